use std::path::Path;

use superpattern::format::{parse_host, parse_values};
use superpattern::{AnyHost, Error, Occurrence, Permutation, RarySequence};

use crate::output::{CliError, CliResult};
use crate::{HostArgs, SequenceAlphabet};

fn read_file(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))
}

/// Inline or file host. An inline host is a sequence when `r` is given.
pub fn load_host(args: &HostArgs, alphabet: Option<&SequenceAlphabet>) -> CliResult<AnyHost> {
    let r = alphabet.and_then(|a| a.r);
    load(args.sigma.as_deref(), args.input.as_deref(), r)
}

pub fn load(sigma: Option<&str>, input: Option<&Path>, r: Option<u32>) -> CliResult<AnyHost> {
    let text = match (sigma, input) {
        (Some(inline), None) => match r {
            Some(r) => format!("# r={r}\n{inline}"),
            None => inline.to_string(),
        },
        (None, Some(path)) => {
            if r.is_some() {
                return Err(CliError::Usage("--r only applies to inline hosts".into()));
            }
            read_file(path)?
        }
        _ => return Err(CliError::Usage("give exactly one of --sigma and --input".into())),
    };
    Ok(parse_host(&text)?)
}

pub fn expect_perm(host: AnyHost) -> CliResult<Permutation> {
    match host {
        AnyHost::Perm(p) => Ok(p),
        AnyHost::Seq(_) => Err(Error::Parse("this subcommand needs a permutation host".into()).into()),
    }
}

pub fn expect_seq(host: AnyHost) -> CliResult<RarySequence> {
    match host {
        AnyHost::Seq(s) => Ok(s),
        AnyHost::Perm(_) => Err(Error::Parse(
            "this subcommand needs a sequence host (`# r=<int>` header or --r)".into(),
        )
        .into()),
    }
}

pub fn indices(list: &str) -> CliResult<Vec<usize>> {
    parse_values(list)?
        .into_iter()
        .map(|v| usize::try_from(v).map_err(|_| Error::Parse(format!("{v} is not a position")).into()))
        .collect()
}

pub fn symbols(list: &str) -> CliResult<Vec<u32>> {
    parse_values(list)?
        .into_iter()
        .map(|v| u32::try_from(v).map_err(|_| Error::Parse(format!("{v} is not a symbol")).into()))
        .collect()
}

pub fn positional(list: &str) -> CliResult<Occurrence> {
    Ok(Occurrence::positional(indices(list)?)?)
}

pub fn pattern(list: &str) -> CliResult<Permutation> {
    let values = symbols(list)?;
    if values.is_empty() {
        return Err(Error::Parse("empty pattern".into()).into());
    }
    Ok(Permutation::new(values)?)
}

/// JSON given inline or as `@path`.
pub fn json_arg<T: serde::de::DeserializeOwned>(arg: &str) -> CliResult<T> {
    let text = match arg.strip_prefix('@') {
        Some(path) => read_file(Path::new(path))?,
        None => arg.to_string(),
    };
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("bad encoding JSON: {e}")).into())
}
