//! Flags of every subcommand. Each parameter struct doubles as the schema of
//! its config-file table.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer};

use crate::config::layered;

/// Flags shared by every subcommand; never read from the config file.
#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    /// Directory for output files.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Print the JSON report instead of the summary.
    #[arg(long)]
    pub json: bool,
    /// Print nothing on success.
    #[arg(long)]
    pub quiet: bool,
    /// TOML file with a table per subcommand.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
}

/// A complex number written `re,im`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point(pub Complex64);

impl FromStr for Point {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (re, im) = s
            .split_once(',')
            .ok_or_else(|| format!("expected re,im, got {s:?}"))?;
        let parse = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
        Ok(Point(Complex64::new(parse(re)?, parse(im)?)))
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Pair([f64; 2]),
        }
        match Raw::deserialize(d)? {
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Raw::Pair([re, im]) => Ok(Point(Complex64::new(re, im))),
        }
    }
}

#[derive(ValueEnum, Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyChoice {
    /// Squared Lorentzian centered on the peak photon energy.
    Lorentzian,
    SimplePole,
    /// Circular transition n → n−1 of hydrogen; needs `--n`.
    Hydrogen,
    /// Rational weight in `t = (y−1)/μ`; needs `--numerator` and `--denominator`.
    Rational,
}

#[derive(ValueEnum, Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum MethodChoice {
    Jump,
    Contour,
    CrossChecked,
}

/// The resolvent and its parameters.
#[derive(Args, Deserialize, Debug, Clone, Default)]
#[serde(default, rename_all = "kebab-case")]
pub struct Model {
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long, value_enum)]
    pub family: Option<FamilyChoice>,
    /// Upper level of the hydrogen transition.
    #[arg(long)]
    pub n: Option<u32>,
    /// Ascending numerator coefficients of the rational weight.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub numerator: Option<Vec<f64>>,
    /// Ascending denominator coefficients of the rational weight.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub denominator: Option<Vec<f64>>,
    /// How the resolvent is continued below the real axis.
    #[arg(long, value_enum)]
    pub method: Option<MethodChoice>,
}

layered!(Model {
    kappa,
    mu,
    delta,
    family,
    n,
    numerator,
    denominator,
    method
});

#[derive(Args, Deserialize, Debug, Clone, Default)]
#[serde(default, rename_all = "kebab-case")]
pub struct FindParams {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: Model,
    /// Extra Newton seed `re,im`; repeatable.
    #[arg(long, allow_hyphen_values = true)]
    pub seed: Option<Vec<Point>>,
    /// Nominal steps per rung of the κ → 0 classification ladder.
    #[arg(long)]
    pub classify_steps: Option<usize>,
}

layered!(FindParams { seed, classify_steps } nested { model });

#[derive(ValueEnum, Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum VaryChoice {
    Kappa,
    Mu,
    Delta,
}

#[derive(ValueEnum, Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Spacing {
    Linear,
    Geometric,
}

#[derive(ValueEnum, Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum SweepPreset {
    /// Both resonances for μ from 0.01 to 1 (κ = 0.1, δ = 0.25).
    Fig1,
    /// Both resonances for δ from −0.9 to 3 (κ = 0.1, μ = 0.01).
    Fig4,
    /// The same detuning sweep, for plotting real parts against δ.
    Fig5,
    /// Detuning sweep just above the critical coupling (κ = 0.0031).
    Fig8Strong,
    /// Detuning sweep just below the critical coupling (κ = 0.0029).
    Fig8Weak,
    /// The third zero from μ = 2 down to μ = 0.01.
    Fig10,
}

#[derive(Args, Deserialize, Debug, Clone, Default)]
#[serde(default, rename_all = "kebab-case")]
pub struct SweepParams {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: Model,
    #[arg(long, value_enum)]
    pub preset: Option<SweepPreset>,
    #[arg(long, value_enum)]
    pub vary: Option<VaryChoice>,
    /// Start value; defaults to the model value of the varied parameter.
    #[arg(long)]
    pub from: Option<f64>,
    #[arg(long)]
    pub to: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long, value_enum)]
    pub spacing: Option<Spacing>,
    /// Starting zero `re,im`, refined before tracking; repeatable. Defaults
    /// to the two resonances nearest the dressed energies.
    #[arg(long, allow_hyphen_values = true)]
    pub seed: Option<Vec<Point>>,
    /// Largest accepted jump of a zero in one step.
    #[arg(long)]
    pub continuity_cap: Option<f64>,
    /// Smallest step, relative to the nominal one, before tracking is lost.
    #[arg(long)]
    pub min_step_ratio: Option<f64>,
    /// File name stem for `<stem>.branch<k>.csv` and `<stem>.svg`.
    #[arg(long)]
    pub stem: Option<String>,
    /// Skip the SVG plot.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub no_svg: Option<bool>,
}

layered!(SweepParams {
    preset, vary, from, to, steps, spacing, seed, continuity_cap, min_step_ratio, stem, no_svg
} nested { model });

#[derive(Args, Deserialize, Debug, Clone, Default)]
#[serde(default, rename_all = "kebab-case")]
pub struct CriticalParams {
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long, value_enum)]
    pub family: Option<FamilyChoice>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub numerator: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub denominator: Option<Vec<f64>>,
    /// Starting coupling for the solver.
    #[arg(long)]
    pub kappa_guess: Option<f64>,
    #[arg(long)]
    pub delta_guess: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub zeta_guess: Option<Point>,
    /// Skip the regime probes on either side of κ_c.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub no_probe: Option<bool>,
}

layered!(CriticalParams {
    mu,
    family,
    numerator,
    denominator,
    kappa_guess,
    delta_guess,
    zeta_guess,
    no_probe
});

#[derive(ValueEnum, Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum DiscreteMode {
    /// Four eigenvalues of the three-mode matrix.
    Matrix,
    /// Closed-form dressed pair of the n-excitation block.
    Dressed,
}

#[derive(ValueEnum, Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum DiscretePreset {
    /// Dressed pair against detuning for an infinitely narrow continuum.
    Fig3,
    /// Matrix eigenvalues at κ = 0.1.
    Fig6,
    /// Matrix eigenvalues at κ = 0.002.
    Fig9,
}

#[derive(Args, Deserialize, Debug, Clone, Default)]
#[serde(default, rename_all = "kebab-case")]
pub struct DiscreteParams {
    #[arg(long, value_enum)]
    pub preset: Option<DiscretePreset>,
    #[arg(long, value_enum)]
    pub mode: Option<DiscreteMode>,
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    /// Excitation number of the dressed pair.
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub from: Option<f64>,
    #[arg(long)]
    pub to: Option<f64>,
    /// Number of detunings, both ends included.
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub stem: Option<String>,
    /// Skip the SVG plot.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub no_svg: Option<bool>,
}

layered!(DiscreteParams {
    preset,
    mode,
    kappa,
    mu,
    n,
    from,
    to,
    steps,
    stem,
    no_svg
});

#[derive(Args, Deserialize, Debug, Clone, Default)]
#[serde(default, rename_all = "kebab-case")]
pub struct HydrogenParams {
    /// Upper levels of the transitions; comma separated.
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<u32>>,
    /// Polarization channels in the total width.
    #[arg(long)]
    pub channels: Option<u32>,
}

layered!(HydrogenParams { n, channels });

#[derive(Args, Deserialize, Debug, Clone, Default)]
#[serde(default, rename_all = "kebab-case")]
pub struct SelftestParams {
    /// Run only these criteria; comma separated.
    #[arg(long, value_delimiter = ',')]
    pub criterion: Option<Vec<u32>>,
    /// Multiply every tolerance; values below 1 tighten the suite.
    #[arg(long)]
    pub tolerance_scale: Option<f64>,
}

layered!(SelftestParams {
    criterion,
    tolerance_scale
});

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_parse_from_text_and_pairs() {
        assert_eq!(
            "1.5,-2e-3".parse::<Point>().unwrap(),
            Point(Complex64::new(1.5, -2e-3))
        );
        assert!("1.5".parse::<Point>().is_err());
        let p: Point = toml::Value::Array(vec![1.0.into(), (-2.0).into()])
            .try_into()
            .unwrap();
        assert_eq!(p, Point(Complex64::new(1.0, -2.0)));
    }
}
