use std::path::Path;

use serde_json::Value;

use crate::error::{Error, Result};
use crate::funcs::FuncDescriptor;

/// Inline JSON when the argument starts with `{`, otherwise a file path.
pub fn load_json(arg: &str, what: &str) -> Result<Value> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(Path::new(arg))
            .map_err(|e| Error::InvalidParameter(format!("cannot read {what} file {arg}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| Error::schema("$", format!("malformed {what} JSON: {e}")))
}

pub fn load_descriptor(arg: &str) -> Result<FuncDescriptor> {
    let value = load_json(arg, "descriptor")?;
    let f = FuncDescriptor::from_json_value(&value)?;
    f.validate()?;
    Ok(f)
}

/// `sqrtP` is `{√P}`; anything else must parse as a number.
pub fn parse_beta(token: &str) -> Result<f64> {
    let token = token.trim();
    if let Some(p) = token.strip_prefix("sqrt") {
        let p: u64 = p
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("bad beta shorthand {token:?}")))?;
        let r = (p as f64).sqrt();
        if r.fract() == 0.0 {
            return Err(Error::InvalidParameter(format!("{token} has zero fractional part")));
        }
        return Ok(r.fract());
    }
    let b: f64 = token
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("bad beta {token:?}")))?;
    if !b.is_finite() {
        return Err(Error::InvalidParameter(format!("beta {token} is not finite")));
    }
    Ok(b)
}

pub fn parse_betas(list: &str) -> Result<Vec<f64>> {
    let betas = list
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(parse_beta)
        .collect::<Result<Vec<_>>>()?;
    if betas.is_empty() {
        return Err(Error::InvalidParameter("empty beta list".into()));
    }
    Ok(betas)
}

/// `+,-,+` as `[1, -1, 1]`.
pub fn parse_pattern(list: &str) -> Result<Vec<i8>> {
    list.split(',')
        .map(|s| match s.trim() {
            "+" | "+1" | "1" => Ok(1),
            "-" | "-1" => Ok(-1),
            other => Err(Error::InvalidParameter(format!("bad sign {other:?}, expected + or -"))),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_shorthands() {
        assert_eq!(parse_beta("sqrt2").unwrap(), 2f64.sqrt() - 1.0);
        assert_eq!(parse_beta("0.25").unwrap(), 0.25);
        assert!(parse_beta("sqrt4").is_err());
        assert!(parse_beta("sqrtx").is_err());
        assert_eq!(parse_betas("sqrt2, sqrt3").unwrap().len(), 2);
    }

    #[test]
    fn patterns() {
        assert_eq!(parse_pattern("+,-,+").unwrap(), vec![1, -1, 1]);
        assert!(parse_pattern("+,0").is_err());
    }

    #[test]
    fn inline_descriptor() {
        let f = load_descriptor(r#"{"type":"linear","c":2}"#).unwrap();
        assert_eq!(f.label(), FuncDescriptor::linear(2.0).label());
        let e = load_descriptor(r#"{"type":"sinlog","alpha":0.1}"#).unwrap_err();
        assert!(e.to_string().contains("$.beta"), "{e}");
    }
}
