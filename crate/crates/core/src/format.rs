//! Plain-text host format: an optional `# r=<int>` line marking an r-ary
//! sequence, then whitespace-separated integers.

use crate::error::{Error, Result};
use crate::perm::{AnyHost, Permutation, RarySequence};

/// Integers separated by whitespace and/or commas.
pub fn parse_values(text: &str) -> Result<Vec<i64>> {
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<i64>().map_err(|_| Error::Parse(format!("'{t}' is not an integer"))))
        .collect()
}

fn parse_header(line: &str) -> Result<u32> {
    let body = line.trim_start_matches('#').trim();
    let value = body
        .strip_prefix("r=")
        .or_else(|| body.strip_prefix("r ="))
        .ok_or_else(|| Error::Parse(format!("expected '# r=<int>', got '{line}'")))?;
    value
        .trim()
        .parse::<u32>()
        .map_err(|_| Error::Parse(format!("alphabet size '{}' is not a positive integer", value.trim())))
}

fn to_u32(values: Vec<i64>, bound: u32) -> Result<Vec<u32>> {
    values
        .into_iter()
        .map(|v| {
            if v < 1 || v > i64::from(bound) {
                Err(Error::ValueOutOfRange { value: v, r: bound })
            } else {
                Ok(v as u32)
            }
        })
        .collect()
}

/// Reads a permutation, or a sequence when a `# r=<int>` header is present.
pub fn parse_host(text: &str) -> Result<AnyHost> {
    let mut lines = text.lines().skip_while(|l| l.trim().is_empty()).peekable();
    let header = match lines.peek() {
        Some(l) if l.trim_start().starts_with('#') => Some(parse_header(l.trim())?),
        _ => None,
    };
    if header.is_some() {
        lines.next();
    }
    let rest: Vec<&str> = lines.collect();
    let values = parse_values(&rest.join("\n"))?;
    match header {
        Some(r) => Ok(AnyHost::Seq(RarySequence::new(to_u32(values, r)?, r)?)),
        None => {
            let n = values.len();
            if n == 0 {
                return Err(Error::Parse("empty permutation".into()));
            }
            Ok(AnyHost::Perm(Permutation::new(to_u32(values, n as u32)?)?))
        }
    }
}

pub fn parse_permutation(text: &str) -> Result<Permutation> {
    match parse_host(text)? {
        AnyHost::Perm(p) => Ok(p),
        AnyHost::Seq(_) => Err(Error::Parse("expected a permutation, found a sequence".into())),
    }
}

pub fn write_host(host: &AnyHost) -> String {
    match host {
        AnyHost::Perm(p) => format!("{}\n", join(p.as_slice())),
        AnyHost::Seq(s) => format!("# r={}\n{}\n", s.alphabet_size(), join(s.as_slice())),
    }
}

fn join(v: &[u32]) -> String {
    v.iter().map(u32::to_string).collect::<Vec<_>>().join(" ")
}
