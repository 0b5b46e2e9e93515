//! Text and JSON encodings of numbers: complex values as `a+bi` or
//! `{"re": a, "im": b}`, non-finite reals as the strings `"inf"`, `"-inf"`
//! and `"nan"`.

use serde_json::{json, Value};
use weylsys::{Complex64, ExtendedReal};

pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let err = || format!("invalid complex number '{s}', expected a+bi");
    let z = match t.strip_suffix('i') {
        None => Complex64::new(t.parse::<f64>().map_err(|_| err())?, 0.0),
        Some(body) => {
            let b = body.as_bytes();
            let split = (1..b.len())
                .rev()
                .find(|&k| (b[k] == b'+' || b[k] == b'-') && !matches!(b[k - 1], b'e' | b'E'));
            let (re, im) = match split {
                Some(k) => (&body[..k], &body[k..]),
                None => ("0", body),
            };
            let im = match im {
                "" | "+" => 1.0,
                "-" => -1.0,
                v => v.parse::<f64>().map_err(|_| err())?,
            };
            Complex64::new(re.parse::<f64>().map_err(|_| err())?, im)
        }
    };
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(err())
    }
}

pub fn real_text(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else if x != 0.0 && !(1e-5..1e16).contains(&x.abs()) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

pub fn complex_text(z: Complex64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{sign}{}i", real_text(z.re), real_text(z.im.abs()))
}

pub fn ext_text(x: ExtendedReal) -> String {
    match x {
        ExtendedReal::Finite(v) => real_text(v),
        ExtendedReal::Infinity => "inf".into(),
    }
}

pub fn opt_text(x: Option<f64>) -> String {
    x.map(real_text).unwrap_or_default()
}

pub fn real(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::String(real_text(x))
    }
}

pub fn complex(z: Complex64) -> Value {
    json!({ "re": real(z.re), "im": real(z.im) })
}

pub fn ext(x: ExtendedReal) -> Value {
    match x {
        ExtendedReal::Finite(v) => real(v),
        ExtendedReal::Infinity => Value::String("inf".into()),
    }
}

pub fn opt(x: Option<f64>) -> Value {
    x.map(real).unwrap_or(Value::Null)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn parses_complex_forms() {
        assert_eq!(parse_complex("0+1i"), Ok(c(0.0, 1.0)));
        assert_eq!(parse_complex("4+0i"), Ok(c(4.0, 0.0)));
        assert_eq!(parse_complex("-1-2.5i"), Ok(c(-1.0, -2.5)));
        assert_eq!(parse_complex("1e-3+2e+1i"), Ok(c(1e-3, 20.0)));
        assert_eq!(parse_complex("2i"), Ok(c(0.0, 2.0)));
        assert_eq!(parse_complex("-i"), Ok(c(0.0, -1.0)));
        assert_eq!(parse_complex("i"), Ok(c(0.0, 1.0)));
        assert_eq!(parse_complex("-3"), Ok(c(-3.0, 0.0)));
        assert_eq!(parse_complex(" 1 + 1i "), Ok(c(1.0, 1.0)));
        for bad in ["", "abc", "1+", "1+2j", "inf", "1++2i", "nan+1i"] {
            assert!(parse_complex(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn text_round_trip() {
        for z in [c(1.5, -0.25), c(-0.0, 0.0), c(1e-300, 7e22), c(0.1, -0.3)] {
            assert_eq!(parse_complex(&complex_text(z)), Ok(z));
        }
        assert_eq!(complex_text(c(1.0, -1.0)), "1-1i");
        assert_eq!(real_text(2.5e-10), "2.5e-10");
        assert_eq!(real_text(0.001), "0.001");
    }

    #[test]
    fn non_finite_encodings() {
        assert_eq!(real(f64::INFINITY), json!("inf"));
        assert_eq!(real(f64::NEG_INFINITY), json!("-inf"));
        assert_eq!(real(f64::NAN), json!("nan"));
        assert_eq!(ext(ExtendedReal::Infinity), json!("inf"));
        assert_eq!(opt(None), Value::Null);
        assert_eq!(opt_text(None), "");
    }
}
