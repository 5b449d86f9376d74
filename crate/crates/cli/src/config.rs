//! Parameter files: TOML with one table per subcommand whose keys are the
//! long flag names. Flags given on the command line win.

use std::path::Path;

use serde::de::DeserializeOwned;

use crate::output::Failure;

/// Flags that only make sense on the command line.
const RESERVED: [&str; 4] = ["out", "json", "quiet", "config"];

/// Later layers fill the gaps left by earlier ones.
pub trait Layered {
    fn layer(self, base: Self) -> Self;
}

macro_rules! layered {
    ($t:ty { $($f:ident),* $(,)? } $(nested { $($g:ident),* })?) => {
        impl $crate::config::Layered for $t {
            fn layer(self, base: Self) -> Self {
                Self {
                    $($f: self.$f.or(base.$f),)*
                    $($($g: self.$g.layer(base.$g),)*)?
                }
            }
        }
    };
}
pub(crate) use layered;

/// Reads table `name` from `path` (absent table = empty) and checks every key
/// against the subcommand's flags.
pub fn section<T: DeserializeOwned + Default>(
    path: Option<&Path>,
    name: &str,
    cmd: &clap::Command,
) -> Result<T, Failure> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    parse_section(&text, name, cmd).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn parse_section<T: DeserializeOwned + Default>(
    text: &str,
    name: &str,
    cmd: &clap::Command,
) -> Result<T, String> {
    let doc: toml::Table = text.parse().map_err(|e: toml::de::Error| e.to_string())?;
    let Some(value) = doc.get(name) else {
        return Ok(T::default());
    };
    let Some(table) = value.as_table() else {
        return Err(format!("[{name}] must be a table"));
    };
    let known: Vec<&str> = cmd
        .get_arguments()
        .filter_map(|a| a.get_long())
        .filter(|l| !RESERVED.contains(l))
        .collect();
    for key in table.keys() {
        if !known.contains(&key.as_str()) {
            return Err(format!("unknown key {key:?} in [{name}]"));
        }
    }
    T::deserialize(toml::Value::Table(table.clone())).map_err(|e| format!("[{name}]: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::{Args, Command, FromArgMatches};
    use serde::Deserialize;

    #[derive(Args, Deserialize, Default, Debug, PartialEq)]
    #[serde(default, rename_all = "kebab-case")]
    struct Knobs {
        #[arg(long)]
        kappa: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        out: Option<String>,
    }

    layered!(Knobs { kappa, steps, out });

    fn cmd() -> Command {
        Knobs::augment_args(Command::new("sweep"))
    }

    #[test]
    fn reads_numbers_with_exponents() {
        let k: Knobs =
            parse_section("[sweep]\nkappa = 1e-3\nsteps = 40\n", "sweep", &cmd()).unwrap();
        assert_eq!(k.kappa, Some(1e-3));
        assert_eq!(k.steps, Some(40));
        let k: Knobs = parse_section("[sweep]\nkappa = 2\n", "sweep", &cmd()).unwrap();
        assert_eq!(k.kappa, Some(2.0));
    }

    #[test]
    fn other_sections_are_ignored() {
        let k: Knobs = parse_section("[find]\nkappa = 1\n", "sweep", &cmd()).unwrap();
        assert_eq!(k, Knobs::default());
    }

    #[test]
    fn unknown_and_reserved_keys_are_rejected() {
        assert!(parse_section::<Knobs>("[sweep]\nkapa = 1\n", "sweep", &cmd()).is_err());
        assert!(parse_section::<Knobs>("[sweep]\nout = \"x\"\n", "sweep", &cmd()).is_err());
        assert!(parse_section::<Knobs>("[sweep]\nkappa = \"big\"\n", "sweep", &cmd()).is_err());
    }

    #[test]
    fn flags_win_over_the_file() {
        let m = cmd().get_matches_from(["sweep", "--kappa", "0.5"]);
        let flags = Knobs::from_arg_matches(&m).unwrap();
        let file: Knobs =
            parse_section("[sweep]\nkappa = 1\nsteps = 9\n", "sweep", &cmd()).unwrap();
        let merged = flags.layer(file);
        assert_eq!(merged.kappa, Some(0.5));
        assert_eq!(merged.steps, Some(9));
    }
}
