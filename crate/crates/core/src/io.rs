//! JSON input formats.
//!
//! * Rationals: `"num/den"` strings or JSON integers.
//! * Reals: JSON numbers or rational strings.
//! * Complex numbers: a real, or an `[re, im]` pair of reals.
//! * Vectors: arrays of complex numbers. Basis vectors and rays are
//!   normalized on load, so `[1, 1, 0]` is accepted for `|+⟩`.
//! * Matrices: arrays of rows (row-major).
//!
//! Every parser reports the JSON path of the first offending value.

use std::fmt;

use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde_json::Value;

use crate::coherence::{BetPortfolio, PriceBook};
use crate::events::{BettingContext, Event, SampleSpace};
use crate::frames::{Frame, QuantumContext};
use crate::hilbert::{CMatrix, Projector, Pvm, StateVector};
use crate::kochen_specker::{build_exact_instance, build_instance, ExactRay, KsInstance};
use crate::scalar::parse_rational;
use crate::twenty_questions::{Lexicon, Mode, Proposition, DEFAULT_BUDGET};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IoError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for IoError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

impl std::error::Error for IoError {}

pub type Result<T> = std::result::Result<T, IoError>;

fn err<T>(path: &str, message: impl fmt::Display) -> Result<T> {
    Err(IoError {
        path: path.to_string(),
        message: message.to_string(),
    })
}

fn domain<T, E: fmt::Display>(path: &str, r: std::result::Result<T, E>) -> Result<T> {
    r.or_else(|e| err(path, e))
}

pub fn parse_json(text: &str) -> Result<Value> {
    domain("", serde_json::from_str(text))
}

fn field<'a>(v: &'a Value, path: &str, key: &str) -> Result<&'a Value> {
    match v.get(key) {
        Some(x) => Ok(x),
        None => err(path, format!("missing field {key:?}")),
    }
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    match v.as_array() {
        Some(a) => Ok(a),
        None => err(path, "expected an array"),
    }
}

fn string<'a>(v: &'a Value, path: &str) -> Result<&'a str> {
    match v.as_str() {
        Some(s) => Ok(s),
        None => err(path, "expected a string"),
    }
}

fn index(v: &Value, path: &str) -> Result<usize> {
    match v.as_u64() {
        Some(i) => Ok(i as usize),
        None => err(path, "expected a nonnegative integer"),
    }
}

fn strings(v: &Value, path: &str) -> Result<Vec<String>> {
    array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, x)| string(x, &format!("{path}[{i}]")).map(str::to_string))
        .collect()
}

/// Exact rational: a `"num/den"` string or a JSON integer.
pub fn rational(v: &Value, path: &str) -> Result<Rational> {
    match v {
        Value::String(s) => match parse_rational(s) {
            Some(q) => Ok(q),
            None => err(path, format!("{s:?} is not a rational \"num/den\"")),
        },
        Value::Number(n) if n.is_i64() => Ok(Rational::from_integer(n.as_i64().unwrap().into())),
        _ => err(path, "expected a rational \"num/den\" string or an integer"),
    }
}

/// Real number: JSON number or rational string.
pub fn real(v: &Value, path: &str) -> Result<f64> {
    match v {
        Value::Number(n) => Ok(n.as_f64().unwrap()),
        Value::String(_) => Ok(rational(v, path)?.to_f64().unwrap_or(f64::NAN)),
        _ => err(path, "expected a number"),
    }
}

pub fn complex(v: &Value, path: &str) -> Result<Complex<f64>> {
    match v {
        Value::Array(pair) if pair.len() == 2 => Ok(Complex::new(
            real(&pair[0], &format!("{path}[0]"))?,
            real(&pair[1], &format!("{path}[1]"))?,
        )),
        Value::Array(_) => err(path, "complex numbers are [re, im] pairs"),
        _ => Ok(Complex::new(real(v, path)?, 0.0)),
    }
}

/// Complex rational if every part is an integer or rational string.
fn exact_complex(v: &Value) -> Option<Complex<BigRational>> {
    let part = |x: &Value| rational(x, "").ok();
    match v {
        Value::Array(pair) if pair.len() == 2 => Some(Complex::new(part(&pair[0])?, part(&pair[1])?)),
        _ => Some(Complex::new(part(v)?, BigRational::zero())),
    }
}

pub fn amplitudes(v: &Value, path: &str) -> Result<Vec<Complex<f64>>> {
    array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, x)| complex(x, &format!("{path}[{i}]")))
        .collect()
}

/// A ray, normalized on load.
pub fn ray(v: &Value, path: &str) -> Result<StateVector<f64>> {
    domain(path, StateVector::normalized(amplitudes(v, path)?))
}

fn rays(v: &Value, path: &str) -> Result<Vec<StateVector<f64>>> {
    array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, x)| ray(x, &format!("{path}[{i}]")))
        .collect()
}

pub fn matrix(v: &Value, path: &str) -> Result<CMatrix<f64>> {
    let rows = array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, r)| amplitudes(r, &format!("{path}[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    domain(path, CMatrix::from_rows(rows))
}

/// A matrix file: bare, `{"rho": matrix}` or `{"matrix": matrix}`.
/// Validation is left to the caller so that diagnostics can be reported.
pub fn rho_matrix(v: &Value) -> Result<CMatrix<f64>> {
    match (v.get("rho"), v.get("matrix")) {
        (Some(m), _) => matrix(m, "rho"),
        (None, Some(m)) => matrix(m, "matrix"),
        _ => matrix(v, ""),
    }
}

/// A projector file: `{"rays": [...]}` (orthonormal rays spanning the range),
/// `{"matrix": m}`, or a bare matrix. `dim` is needed only for an empty ray list.
pub fn projector(v: &Value) -> Result<Projector<f64>> {
    if let Some(r) = v.get("rays") {
        let rs = rays(r, "rays")?;
        let dim = match v.get("dim") {
            Some(d) => index(d, "dim")?,
            None => match rs.first() {
                Some(s) => s.dim(),
                None => return err("dim", "required when \"rays\" is empty"),
            },
        };
        return domain("rays", Projector::from_rays(dim, &rs));
    }
    let m = match v.get("matrix") {
        Some(m) => matrix(m, "matrix")?,
        None => matrix(v, "")?,
    };
    domain("matrix", Projector::from_matrix(m))
}

/// `{"elements": [{"label", "rays" | "matrix"}, ...]}`.
pub fn pvm(v: &Value) -> Result<Pvm<f64>> {
    let elements = array(field(v, "", "elements")?, "elements")?;
    let mut projectors = Vec::with_capacity(elements.len());
    let mut labels = Vec::with_capacity(elements.len());
    for (i, e) in elements.iter().enumerate() {
        let path = format!("elements[{i}]");
        labels.push(match e.get("label") {
            Some(l) => string(l, &format!("{path}.label"))?.to_string(),
            None => i.to_string(),
        });
        projectors.push(projector(e).map_err(|x| IoError {
            path: format!("{path}.{}", x.path),
            message: x.message,
        })?);
    }
    domain("elements", Pvm::new(projectors, labels))
}

pub fn space(v: &Value, path: &str) -> Result<SampleSpace> {
    domain(path, SampleSpace::new(strings(v, path)?))
}

pub fn event(space: &SampleSpace, v: &Value, path: &str) -> Result<Event> {
    domain(path, space.event_from_labels(strings(v, path)?))
}

/// `{"context", "space"?, "prices": [{"atoms", "price"}]}`. Without an
/// explicit `"space"` the atoms mentioned in the prices, in order of first
/// appearance, form the space.
pub fn price_book(v: &Value) -> Result<PriceBook<Rational>> {
    let id = match v.get("context") {
        Some(c) => string(c, "context")?.to_string(),
        None => "context".to_string(),
    };
    let entries = array(field(v, "", "prices")?, "prices")?;
    let sp = match v.get("space") {
        Some(s) => space(s, "space")?,
        None => {
            let mut labels: Vec<String> = Vec::new();
            for (i, e) in entries.iter().enumerate() {
                let path = format!("prices[{i}].atoms");
                for l in strings(field(e, &format!("prices[{i}]"), "atoms")?, &path)? {
                    if !labels.contains(&l) {
                        labels.push(l);
                    }
                }
            }
            domain("prices", SampleSpace::new(labels))?
        }
    };
    let mut book = PriceBook::new(BettingContext::new(id, sp.clone()));
    for (i, e) in entries.iter().enumerate() {
        let path = format!("prices[{i}]");
        let ev = event(&sp, field(e, &path, "atoms")?, &format!("{path}.atoms"))?;
        let p = rational(field(e, &path, "price")?, &format!("{path}.price"))?;
        if book.price_of(&ev).is_some() {
            return err(&format!("{path}.atoms"), "event is priced more than once");
        }
        book = book.with_price(ev, p);
    }
    Ok(book)
}

/// `{"stakes": [{"atoms", "stake"}]}` against the book's space.
pub fn portfolio(book: &PriceBook<Rational>, v: &Value) -> Result<BetPortfolio<Rational>> {
    let entries = array(field(v, "", "stakes")?, "stakes")?;
    let mut stakes = Vec::with_capacity(entries.len());
    for (i, e) in entries.iter().enumerate() {
        let path = format!("stakes[{i}]");
        let ev = event(&book.context.space, field(e, &path, "atoms")?, &format!("{path}.atoms"))?;
        stakes.push((ev, rational(field(e, &path, "stake")?, &format!("{path}.stake"))?));
    }
    Ok(BetPortfolio { stakes })
}

/// The `"contexts"` array: `[{"id", "basis", "labels"?}]`.
pub fn contexts(v: &Value) -> Result<Vec<QuantumContext<f64>>> {
    let list = array(field(v, "", "contexts")?, "contexts")?;
    let mut out = Vec::with_capacity(list.len());
    for (i, c) in list.iter().enumerate() {
        let path = format!("contexts[{i}]");
        let id = string(field(c, &path, "id")?, &format!("{path}.id"))?;
        let basis = rays(field(c, &path, "basis")?, &format!("{path}.basis"))?;
        let ctx = match c.get("labels") {
            Some(l) => QuantumContext::with_labels(id, basis, strings(l, &format!("{path}.labels"))?),
            None => QuantumContext::from_basis(id, basis),
        };
        out.push(domain(&path, ctx)?);
    }
    Ok(out)
}

/// `{"contexts": [...], "assignments": [{"context", "atoms": [label], "prob"}]}`.
/// Each assignment names one atom; unlisted atoms get probability zero.
pub fn frame(v: &Value) -> Result<Frame<f64>> {
    let ctxs = contexts(v)?;
    let mut probs: Vec<Vec<f64>> = ctxs.iter().map(|c| vec![0.0; c.dim()]).collect();
    let entries = array(field(v, "", "assignments")?, "assignments")?;
    for (i, a) in entries.iter().enumerate() {
        let path = format!("assignments[{i}]");
        let cid = string(field(a, &path, "context")?, &format!("{path}.context"))?;
        let Some(ci) = ctxs.iter().position(|c| c.id() == cid) else {
            return err(&format!("{path}.context"), format!("unknown context {cid:?}"));
        };
        let atoms = event(ctxs[ci].space(), field(a, &path, "atoms")?, &format!("{path}.atoms"))?;
        if atoms.len() != 1 {
            return err(&format!("{path}.atoms"), "each assignment must name exactly one atom");
        }
        let atom = atoms.indices().next().unwrap();
        probs[ci][atom] = real(field(a, &path, "prob")?, &format!("{path}.prob"))?;
    }
    domain("assignments", Frame::new(ctxs, probs))
}

/// `{"dim", "rays", "bases"}`. Orthogonality is checked exactly when every
/// amplitude is an integer or rational string.
pub fn ks_instance(v: &Value) -> Result<KsInstance<f64>> {
    let dim = index(field(v, "", "dim")?, "dim")?;
    let raw = array(field(v, "", "rays")?, "rays")?;
    let bases = array(field(v, "", "bases")?, "bases")?
        .iter()
        .enumerate()
        .map(|(i, b)| {
            array(b, &format!("bases[{i}]"))?
                .iter()
                .enumerate()
                .map(|(j, r)| index(r, &format!("bases[{i}][{j}]")))
                .collect::<Result<Vec<usize>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let exact: Option<Vec<ExactRay>> = raw
        .iter()
        .map(|r| r.as_array()?.iter().map(exact_complex).collect())
        .collect();
    match exact {
        Some(rs) => domain("", build_exact_instance(dim, rs, bases)),
        None => domain("", build_instance(dim, rays(field(v, "", "rays")?, "rays")?, bases)),
    }
}

/// A 0/1 assignment: an array of 0/1 (or booleans), or `{"assignment": [...]}`.
pub fn assignment(v: &Value) -> Result<Vec<bool>> {
    let (list, path) = match v.get("assignment") {
        Some(a) => (a, "assignment"),
        None => (v, ""),
    };
    array(list, path)?
        .iter()
        .enumerate()
        .map(|(i, x)| match x {
            Value::Bool(b) => Ok(*b),
            Value::Number(n) if n.as_u64() == Some(0) => Ok(false),
            Value::Number(n) if n.as_u64() == Some(1) => Ok(true),
            _ => err(&format!("{path}[{i}]"), "expected 0 or 1"),
        })
        .collect()
}

/// Probabilities: an array of reals, or `{"probs": [...]}`.
pub fn probabilities(v: &Value) -> Result<Vec<f64>> {
    let (list, path) = match v.get("probs") {
        Some(a) => (a, "probs"),
        None => (v, ""),
    };
    array(list, path)?
        .iter()
        .enumerate()
        .map(|(i, x)| real(x, &format!("{path}[{i}]")))
        .collect()
}

/// `{"words", "attributes", "table"}` with a boolean (or 0/1) table.
pub fn lexicon(v: &Value) -> Result<Lexicon> {
    let words = strings(field(v, "", "words")?, "words")?;
    let attributes = strings(field(v, "", "attributes")?, "attributes")?;
    let table = array(field(v, "", "table")?, "table")?
        .iter()
        .enumerate()
        .map(|(i, row)| {
            array(row, &format!("table[{i}]"))?
                .iter()
                .enumerate()
                .map(|(j, x)| match x {
                    Value::Bool(b) => Ok(*b),
                    Value::Number(n) if n.as_u64() == Some(0) => Ok(false),
                    Value::Number(n) if n.as_u64() == Some(1) => Ok(true),
                    _ => err(&format!("table[{i}][{j}]"), "expected a boolean"),
                })
                .collect::<Result<Vec<bool>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    domain("", Lexicon::new(words, attributes, table))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScriptedQuestion {
    pub respondent: usize,
    pub attribute: usize,
    pub answer: Option<bool>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScriptedBet {
    pub respondent: usize,
    pub proposition: Proposition,
    pub price: Rational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GameScript {
    pub respondents: usize,
    pub budget: usize,
    pub mode: Mode,
    pub questions: Vec<ScriptedQuestion>,
    pub bets: Vec<ScriptedBet>,
}

/// ```json
/// {"respondents": 6, "budget": 20, "mode": "surprise" | "classic",
///  "questions": [{"respondent": 4, "attribute": "white", "answer": true}],
///  "bets": [{"respondent": 4, "word": "dove", "price": "1/10"},
///           {"respondent": 4, "attribute": "white", "value": true, "price": "1/2"}]}
/// ```
/// Respondents are numbered from 0; omitting `"answer"` lets the respondent choose.
pub fn game_script(lex: &Lexicon, v: &Value) -> Result<GameScript> {
    let respondents = index(field(v, "", "respondents")?, "respondents")?;
    let budget = match v.get("budget") {
        Some(b) => index(b, "budget")?,
        None => DEFAULT_BUDGET,
    };
    let mode = match v.get("mode").map(|m| string(m, "mode")) {
        None => Mode::Surprise,
        Some(Ok("surprise")) => Mode::Surprise,
        Some(Ok("classic")) => Mode::Classic,
        Some(Ok(other)) => return err("mode", format!("unknown mode {other:?}")),
        Some(Err(e)) => return Err(e),
    };
    let empty = Vec::new();
    let qs = match v.get("questions") {
        Some(q) => array(q, "questions")?,
        None => &empty,
    };
    let mut questions = Vec::with_capacity(qs.len());
    for (i, q) in qs.iter().enumerate() {
        let path = format!("questions[{i}]");
        let respondent = index(field(q, &path, "respondent")?, &format!("{path}.respondent"))?;
        let attr = string(field(q, &path, "attribute")?, &format!("{path}.attribute"))?;
        let attribute = domain(&format!("{path}.attribute"), lex.attribute_index(attr))?;
        let answer = match q.get("answer") {
            None | Some(Value::Null) => None,
            Some(Value::Bool(b)) => Some(*b),
            Some(_) => return err(&format!("{path}.answer"), "expected a boolean"),
        };
        questions.push(ScriptedQuestion {
            respondent,
            attribute,
            answer,
        });
    }
    let bs = match v.get("bets") {
        Some(b) => array(b, "bets")?,
        None => &empty,
    };
    let mut bets = Vec::with_capacity(bs.len());
    for (i, b) in bs.iter().enumerate() {
        let path = format!("bets[{i}]");
        let respondent = index(field(b, &path, "respondent")?, &format!("{path}.respondent"))?;
        let proposition = match (b.get("word"), b.get("attribute")) {
            (Some(w), None) => {
                let w = string(w, &format!("{path}.word"))?;
                Proposition::Word(domain(&format!("{path}.word"), lex.word_index(w))?)
            }
            (None, Some(a)) => {
                let a = string(a, &format!("{path}.attribute"))?;
                let ai = domain(&format!("{path}.attribute"), lex.attribute_index(a))?;
                let value = match b.get("value") {
                    None => true,
                    Some(Value::Bool(x)) => *x,
                    Some(_) => return err(&format!("{path}.value"), "expected a boolean"),
                };
                Proposition::Attribute(ai, value)
            }
            _ => return err(&path, "a bet names exactly one of \"word\" or \"attribute\""),
        };
        let price = rational(field(b, &path, "price")?, &format!("{path}.price"))?;
        bets.push(ScriptedBet {
            respondent,
            proposition,
            price,
        });
    }
    Ok(GameScript {
        respondents,
        budget,
        mode,
        questions,
        bets,
    })
}

/// `[{"context", "price"}]` or `{"prices": [...]}`.
pub fn context_prices(v: &Value) -> Result<Vec<(String, Rational)>> {
    let (list, path) = match v.get("prices") {
        Some(a) => (a, "prices"),
        None => (v, ""),
    };
    array(list, path)?
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let p = format!("{path}[{i}]");
            Ok((
                string(field(e, &p, "context")?, &format!("{p}.context"))?.to_string(),
                rational(field(e, &p, "price")?, &format!("{p}.price"))?,
            ))
        })
        .collect()
}
