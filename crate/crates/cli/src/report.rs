//! JSON encoding of reports. Reals carry 12 significant digits; rationals
//! are `"num/den"` strings.

use qbets::events::Event;
use qbets::scalar::format_rational;
use qbets::{BetPortfolio, CMatrix, Complex, Rational, StateVector};
use serde_json::{json, Value};

pub fn real(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let rounded: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    // Avoid printing "-0.0".
    let rounded = if rounded == 0.0 { 0.0 } else { rounded };
    json!(rounded)
}

pub fn reals(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| real(x)).collect())
}

pub fn rational(q: &Rational) -> Value {
    Value::String(format_rational(q))
}

pub fn complex(z: Complex) -> Value {
    json!([real(z.re), real(z.im)])
}

pub fn vector(v: &StateVector) -> Value {
    Value::Array(v.amplitudes().iter().map(|&z| complex(z)).collect())
}

pub fn matrix(m: &CMatrix) -> Value {
    Value::Array(
        m.rows()
            .into_iter()
            .map(|row| Value::Array(row.into_iter().map(complex).collect()))
            .collect(),
    )
}

pub fn event(e: &Event) -> Value {
    json!(e.atoms_of())
}

pub fn portfolio(p: &BetPortfolio) -> Value {
    json!({
        "stakes": p.stakes.iter().map(|(e, s)| json!({
            "atoms": event(e),
            "stake": rational(s),
        })).collect::<Vec<_>>()
    })
}
