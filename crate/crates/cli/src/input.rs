//! ODE input files.
//!
//! ```toml
//! [parameters]
//! alpha = "1/2"
//!
//! [coefficients]
//! A0 = "alpha*y^2/x"
//! A1 = "-1/x"
//! A2 = "1/y"
//! A3 = "0"
//!
//! [options]
//! base = "1, 2"
//! max_order = 10
//! ```

use std::collections::BTreeMap;

use liouville_core::OdeCoeffs;
use liouville_expr::{parse_expr, parse_rational, Rational, SymbolTable};
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InputError {
    #[error("malformed input file: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("coefficient {name}: {source}")]
    Expression {
        name: &'static str,
        source: liouville_expr::ParseError,
    },
    #[error("parameter `{0}` is not a rational number: {1}")]
    Parameter(String, String),
    #[error("parameter name `{0}` clashes with a coordinate")]
    ReservedName(String),
    #[error("bad {what} `{text}`: {why}")]
    Value {
        what: &'static str,
        text: String,
        why: String,
    },
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Number {
    Int(i64),
    Text(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
struct Coefficients {
    A0: String,
    A1: String,
    A2: String,
    A3: String,
}

/// Analysis settings that may be given in the file.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileOptions {
    pub base: Option<String>,
    pub max_order: Option<usize>,
    pub tol_abs: Option<f64>,
    pub tol_rel: Option<f64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    #[serde(default)]
    parameters: BTreeMap<String, Number>,
    coefficients: Coefficients,
    #[serde(default)]
    options: FileOptions,
}

/// A parsed input file.
#[derive(Debug, Clone)]
pub struct OdeInput {
    pub parameters: BTreeMap<String, Rational>,
    pub coefficients: OdeCoeffs,
    pub options: FileOptions,
}

pub fn rational(text: &str, what: &'static str) -> Result<Rational, InputError> {
    parse_rational(text).ok_or_else(|| InputError::Value {
        what,
        text: text.to_string(),
        why: "expected an integer or p/q".into(),
    })
}

/// `"a, b"` as a pair of rationals.
pub fn rational_pair(text: &str, what: &'static str) -> Result<(Rational, Rational), InputError> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        return Err(InputError::Value {
            what,
            text: text.to_string(),
            why: "expected two comma-separated values".into(),
        });
    }
    Ok((rational(parts[0], what)?, rational(parts[1], what)?))
}

/// `name=value,name=value` with rational values.
pub fn parameter_list(text: &str) -> Result<BTreeMap<String, Rational>, InputError> {
    let mut out = BTreeMap::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = item.split_once('=').ok_or_else(|| InputError::Value {
            what: "parameter assignment",
            text: item.to_string(),
            why: "expected name=value".into(),
        })?;
        let k = k.trim();
        check_name(k)?;
        out.insert(k.to_string(), rational(v, "parameter value")?);
    }
    Ok(out)
}

fn check_name(name: &str) -> Result<(), InputError> {
    if ["x", "y", "p"].contains(&name) {
        Err(InputError::ReservedName(name.to_string()))
    } else {
        Ok(())
    }
}

pub fn parse_input(text: &str) -> Result<OdeInput, InputError> {
    let raw: RawFile = toml::from_str(text)?;
    let mut parameters = BTreeMap::new();
    for (name, value) in raw.parameters {
        check_name(&name)?;
        let v = match value {
            Number::Int(n) => Rational::from_integer(n.into()),
            Number::Text(t) => parse_rational(&t).ok_or_else(|| InputError::Parameter(name.clone(), t))?,
        };
        parameters.insert(name, v);
    }
    let table = SymbolTable::with_parameters(parameters.keys().cloned());
    let coeff = |name: &'static str, text: &str| {
        parse_expr(text, &table).map_err(|source| InputError::Expression { name, source })
    };
    let c = &raw.coefficients;
    let coefficients = OdeCoeffs::new(
        coeff("A0", &c.A0)?,
        coeff("A1", &c.A1)?,
        coeff("A2", &c.A2)?,
        coeff("A3", &c.A3)?,
    );
    Ok(OdeInput {
        parameters,
        coefficients,
        options: raw.options,
    })
}

/// Text of an input file describing `k` with the given parameter values.
pub fn render_input(k: &OdeCoeffs, parameters: &BTreeMap<String, Rational>) -> String {
    let mut out = String::new();
    if !parameters.is_empty() {
        out.push_str("[parameters]\n");
        for (k, v) in parameters {
            out.push_str(&format!("{k} = \"{v}\"\n"));
        }
        out.push('\n');
    }
    out.push_str("[coefficients]\n");
    for (name, e) in ["A0", "A1", "A2", "A3"].iter().zip(k.as_array()) {
        out.push_str(&format!("{name} = \"{e}\"\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use liouville_expr::rat;

    const FILE: &str = r#"
[parameters]
alpha = "1/2"
beta = -3

[coefficients]
A0 = "alpha*y^2/x + beta/x"
A1 = "-1/x"
A2 = "1/y"
A3 = "0"

[options]
base = "1, 2"
max_order = 8
"#;

    #[test]
    fn parses_a_complete_file() {
        let f = parse_input(FILE).unwrap();
        assert_eq!(f.parameters["alpha"], rat(1, 2));
        assert_eq!(f.parameters["beta"], rat(-3, 1));
        assert_eq!(f.options.max_order, Some(8));
        assert_eq!(
            rational_pair(f.options.base.as_deref().unwrap(), "base").unwrap(),
            (rat(1, 1), rat(2, 1))
        );
        assert_eq!(f.coefficients.a1.to_string(), "-1/x");
    }

    #[test]
    fn rejects_undeclared_symbols_and_missing_coefficients() {
        let undeclared = FILE.replace("beta/x", "gamma/x");
        assert!(matches!(
            parse_input(&undeclared),
            Err(InputError::Expression { name: "A0", .. })
        ));
        let missing = FILE.replace("A3 = \"0\"\n", "");
        assert!(matches!(parse_input(&missing), Err(InputError::Toml(_))));
        let unknown = FILE.replace("max_order", "max_ordr");
        assert!(parse_input(&unknown).is_err());
        let bad = FILE.replace("\"1/2\"", "\"1/0\"");
        assert!(matches!(parse_input(&bad), Err(InputError::Parameter(..))));
    }

    #[test]
    fn render_then_parse() {
        let f = parse_input(FILE).unwrap();
        let back = parse_input(&render_input(&f.coefficients, &f.parameters)).unwrap();
        assert_eq!(back.parameters, f.parameters);
        assert_eq!(back.coefficients, f.coefficients);
    }

    #[test]
    fn parameter_lists() {
        let p = parameter_list("alpha=1, delta=1/2").unwrap();
        assert_eq!(p["delta"], rat(1, 2));
        assert!(parameter_list("alpha").is_err());
        assert!(parameter_list("x=1").is_err());
    }
}
