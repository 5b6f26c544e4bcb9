//! Worked examples stored as golden files, and their replay.

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::bms::{normal_form, run, RunOutput, TraceRecord};
use crate::codes::{decode, random_codeword, AbelianCode, Word};
use crate::ff::{Field, FieldConfig};
use crate::locator::{support_from_basis, syndromes, AlphaPair, SyndromeFile};
use crate::order::{DeltaSet, Point, SofT, TotalOrder};
use crate::poly::BivariatePolynomial;

/// Bundled golden files, by file name.
pub const FILES: [(&str, &str); 4] = [
    ("example_5x7.json", include_str!("../golden/example_5x7.json")),
    ("example_5x5.json", include_str!("../golden/example_5x5.json")),
    ("example_15x15.json", include_str!("../golden/example_15x15.json")),
    (
        "example_code_5x15.json",
        include_str!("../golden/example_code_5x15.json"),
    ),
];

#[derive(Debug, Clone, Deserialize)]
pub struct Golden {
    pub name: String,
    pub field: FieldConfig,
    pub period: (usize, usize),
    pub order: TotalOrder,
    pub t: usize,
    pub error: String,
    /// Printed syndrome table; computed from `error` when absent.
    pub syndromes: Option<SyndromeFile>,
    /// Offset, needed only when `syndromes` is absent.
    pub tau: Option<Point>,
    pub note: Option<String>,
    pub code: Option<GoldenCode>,
    pub trace: Vec<GoldenRow>,
    pub basis: Vec<String>,
    pub support: Vec<Point>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct GoldenCode {
    pub q: u32,
    pub orbits: Vec<Point>,
}

/// A printed trace row; absent cells are not checked.
#[derive(Debug, Clone, Deserialize)]
pub struct GoldenRow {
    pub l: Point,
    #[serde(rename = "F")]
    pub basis: Vec<String>,
    #[serde(rename = "G")]
    pub aux: Option<Vec<String>>,
    pub delta: Option<Vec<Point>>,
}

/// Result of replaying one golden file.
#[derive(Debug, Clone)]
pub struct Replay {
    pub name: String,
    pub run: RunOutput,
    pub mismatches: Vec<String>,
}

impl Replay {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

pub fn load_all() -> Vec<Golden> {
    FILES
        .iter()
        .map(|(name, text)| {
            serde_json::from_str(text).unwrap_or_else(|e| panic!("bundled {name} is malformed: {e}"))
        })
        .collect()
}

fn parse_all(field: &Field, texts: &[String]) -> Result<Vec<BivariatePolynomial>, String> {
    texts
        .iter()
        .map(|s| BivariatePolynomial::parse(field, s).map_err(|e| e.to_string()))
        .collect()
}

/// Whether two bases agree after reduction modulo the staircase; the
/// printed tables sometimes show reduced and sometimes unreduced members.
fn same_modulo_delta(
    field: &Field,
    ours: &[BivariatePolynomial],
    theirs: &[BivariatePolynomial],
    delta: &DeltaSet,
    order: TotalOrder,
) -> bool {
    if ours == theirs {
        return true;
    }
    match (
        normal_form(field, ours, delta, order),
        normal_form(field, theirs, delta, order),
    ) {
        (Ok(a), Ok(b)) => a == b,
        _ => false,
    }
}

fn check_row(
    field: &Field,
    order: TotalOrder,
    row: &GoldenRow,
    rec: &TraceRecord,
    out: &mut Vec<String>,
) -> Result<(), String> {
    let delta = DeltaSet::from_members(rec.delta.iter().copied()).map_err(|e| e.to_string())?;
    let want = parse_all(field, &row.basis)?;
    if !same_modulo_delta(field, &rec.basis, &want, &delta, order) {
        out.push(format!("row {}: F is {}", row.l, texts(&rec.basis, order)));
    }
    if let Some(aux) = &row.aux {
        if rec.aux != parse_all(field, aux)? {
            out.push(format!("row {}: G is {}", row.l, texts(&rec.aux, order)));
        }
    }
    if let Some(d) = &row.delta {
        let want: BTreeSet<Point> = d.iter().copied().collect();
        let got: BTreeSet<Point> = rec.delta.iter().copied().collect();
        if want != got {
            out.push(format!("row {}: delta is {:?}", row.l, rec.delta));
        }
    }
    Ok(())
}

fn texts(polys: &[BivariatePolynomial], order: TotalOrder) -> String {
    let v: Vec<String> = polys.iter().map(|f| f.to_text(order)).collect();
    format!("{{{}}}", v.join(","))
}

/// Seed of the codeword that carries the planted error in code examples.
const CODEWORD_SEED: u64 = 2024;

/// Replays a golden example and lists every disagreement.
pub fn replay(g: &Golden) -> Result<Replay, String> {
    let field = g.field.build().map_err(|e| e.to_string())?;
    let alpha = AlphaPair::for_period(&field, g.period).map_err(|e| e.to_string())?;
    let e = BivariatePolynomial::parse(&field, &g.error).map_err(|e| e.to_string())?;
    let tau = g
        .syndromes
        .as_ref()
        .map(|s| s.tau)
        .or(g.tau)
        .ok_or("golden file gives neither syndromes nor tau")?;
    let s = SofT::new(g.t);
    let computed = syndromes(&field, &e, tau, &alpha, s.schedule(g.order).iter().copied());
    let mut mismatches = Vec::new();
    if let Some(file) = &g.syndromes {
        let printed = file.values(&field).map_err(|e| e.to_string())?;
        for (n, v) in &computed {
            if printed.get(n) != Some(v) {
                mismatches.push(format!(
                    "syndrome {n}: table has {:?}, e gives {v}",
                    printed.get(n)
                ));
            }
        }
    }

    let run_out = match &g.code {
        Some(c) => {
            let code = AbelianCode::new(g.period.0, g.period.1, c.q, &c.orbits).map_err(|e| e.to_string())?;
            let mut rng = ChaCha8Rng::seed_from_u64(CODEWORD_SEED);
            let sent = random_codeword(&field, &alpha, &code, &mut rng).map_err(|e| e.to_string())?;
            let received = sent.add(&field, &Word::from_poly(&field, &e, g.period));
            let out = decode(&field, &alpha, &code, &received, g.t, g.order, Some(tau))
                .map_err(|e| e.to_string())?;
            if out.error.poly() != &e {
                mismatches.push(format!("decoded error {}", out.error.poly().to_text(g.order)));
            }
            if out.corrected != sent {
                mismatches.push("corrected word differs from the sent codeword".into());
            }
            out.run
        }
        None => run(&field, &computed, g.order, g.t, g.period).map_err(|e| e.to_string())?,
    };

    for row in &g.trace {
        match run_out.trace.iter().find(|r| r.l == row.l) {
            Some(rec) => check_row(&field, g.order, row, rec, &mut mismatches)?,
            None => mismatches.push(format!("row {} was never visited", row.l)),
        }
    }
    if run_out.basis != parse_all(&field, &g.basis)? {
        mismatches.push(format!("final basis is {}", texts(&run_out.basis, g.order)));
    }
    let support = support_from_basis(&field, &run_out.basis, &alpha, g.period);
    let want: BTreeSet<Point> = g.support.iter().copied().collect();
    if support != want {
        mismatches.push(format!("support is {support:?}"));
    }
    Ok(Replay {
        name: g.name.clone(),
        run: run_out,
        mismatches,
    })
}
