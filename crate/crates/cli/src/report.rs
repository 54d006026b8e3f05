//! Human-readable rendering and the report container.

use dglift::module::{BlockModule, FreeLayout, SemiFreeModule};
use dglift::ring::TruncatedRing;
use serde_json::{Map, Value};

pub const EXIT_OK: u8 = 0;
pub const EXIT_OBSTRUCTED: u8 = 2;
pub const EXIT_INCONCLUSIVE: u8 = 3;

#[derive(Debug, Default)]
pub struct Report {
    pub lines: Vec<String>,
    pub json: Map<String, Value>,
    pub exit: u8,
    /// JSON lines for `--transcript`.
    pub transcript: Option<String>,
}

impl Report {
    pub fn new(command: &str, ring: String) -> Self {
        let mut json = Map::new();
        json.insert("command".into(), command.into());
        json.insert("ring".into(), ring.into());
        Self {
            json,
            ..Default::default()
        }
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.json.insert(key.into(), value.into());
    }

    pub fn status(&mut self, status: &str, exit: u8) {
        self.set("status", status);
        self.exit = exit;
    }

    pub fn json_text(&self) -> String {
        serde_json::to_string_pretty(&self.json).expect("report serializes") + "\n"
    }
}

/// `c1*x1 + c2*x2 + ...` in degree `d` of `layout`.
pub fn combination<R: TruncatedRing>(layout: &FreeLayout<R>, d: i64, v: &[R::Elem]) -> String {
    let ring = layout.ring();
    let terms: Vec<String> = v
        .iter()
        .enumerate()
        .filter(|(_, c)| !ring.is_zero(c))
        .map(|(pos, c)| {
            let label = layout.basis_label(d, pos);
            let s = ring.format(c);
            if s == "1" {
                label
            } else if s.contains(' ') {
                format!("({s})*{label}")
            } else {
                format!("{s}*{label}")
            }
        })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

pub fn describe_semifree<R: TruncatedRing>(m: &SemiFreeModule<R>) -> Vec<String> {
    let layout = m.layout();
    let mut out = vec![format!("  generators in degrees {:?}", m.degrees())];
    for g in 0..m.generator_count() {
        let d = layout.degree(g);
        out.push(format!("  d(b{g}) = {}", combination(layout, d - 1, m.value(g))));
    }
    if let Some(c) = m.complete_through() {
        out.push(format!("  truncated: complete through degree {c}"));
    }
    out
}

pub fn describe_block<R: TruncatedRing>(n: &BlockModule<R>) -> Vec<String> {
    let layout = n.layout();
    let mut out = vec![format!("  generators in degrees {:?}", n.degrees())];
    for g in 0..n.generator_count() {
        let d = layout.degree(g);
        out.push(format!("  alpha(b{g}) = {}", combination(layout, d - 1, &n.alpha()[g])));
    }
    for g in 0..n.generator_count() {
        let d = layout.degree(g);
        if n.delta()[g].iter().any(|x| !n.ring().is_zero(x)) {
            out.push(format!("  delta(b{g}) = {}", combination(layout, d - 2, &n.delta()[g])));
        }
    }
    out
}

/// `R/(t^e)` summands, with a free summand written `R`.
pub fn homology_group<R: TruncatedRing>(ring: &R, invariants: &[usize]) -> String {
    if invariants.is_empty() {
        return "0".into();
    }
    let t = ring.format(&ring.t());
    invariants
        .iter()
        .map(|&e| match e {
            e if e >= ring.precision() => "R".to_string(),
            1 => format!("R/({t})"),
            e => format!("R/({t}^{e})"),
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

pub fn homology_json(h: &[(i64, Vec<usize>)]) -> Value {
    Value::Array(
        h.iter()
            .map(|(d, inv)| serde_json::json!({"degree": d, "invariants": inv}))
            .collect(),
    )
}
