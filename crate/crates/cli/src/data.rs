use anyhow::{anyhow, bail, Result};
use grenboot::Sample;

/// Parses one observation per line. Blank lines and lines starting with `#`
/// are skipped; every error names its line.
pub fn parse_sample(text: &str, source: &str) -> Result<Sample> {
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let lineno = i + 1;
        let x: f64 = line
            .parse()
            .map_err(|_| anyhow!("{source}:{lineno}: `{line}` is not a number"))?;
        if !(x > 0.0 && x <= 1.0) {
            bail!("{source}:{lineno}: {x} lies outside (0, 1]");
        }
        values.push(x);
    }
    if values.is_empty() {
        bail!("{source}: no observations");
    }
    Ok(Sample::new(values)?)
}

pub fn format_sample(sample: &Sample) -> String {
    sample.values().iter().map(|x| format!("{x}\n")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn skips_comments_and_blanks() {
        let s = parse_sample("# header\n0.75\n\n0.25\n", "d").unwrap();
        assert_eq!(s.values(), &[0.25, 0.75]);
    }

    #[test]
    fn errors_name_the_line() {
        let e = parse_sample("0.5\n1.5\n", "d").unwrap_err().to_string();
        assert!(e.contains("d:2"), "{e}");
        let e = parse_sample("0.5\n\nabc\n", "d").unwrap_err().to_string();
        assert!(e.contains("d:3"), "{e}");
    }

    #[test]
    fn zero_is_rejected() {
        assert!(parse_sample("0\n", "d").is_err());
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(parse_sample("", "d").is_err());
        assert!(parse_sample("# only a comment\n", "d").is_err());
    }

    #[test]
    fn round_trips() {
        let s = Sample::new(vec![0.1, 1.0 / 3.0, 0.9]).unwrap();
        assert_eq!(parse_sample(&format_sample(&s), "d").unwrap(), s);
    }
}
