//! JSON documents for ensembles and discrimination results.
//!
//! Ensemble files look like
//!
//! ```json
//! { "parties": ["A1", "A2"], "slot_dims": [2, 2], "party_of_slot": [0, 1],
//!   "probs": ["0.75", "0.25"], "states": [[[[re, im], ...], ...], ...] }
//! ```
//!
//! Probabilities are written as shortest round-trip decimal strings; plain
//! JSON numbers are accepted on input. An optional `source` object records
//! which builder produced the ensemble.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::discrimination::DiscriminationResult;
use crate::ensembles::{Ensemble, ExampleParams, Origin};
use crate::error::{Error, Result};
use crate::partitions::PartySet;
use crate::scalar::C;
use crate::tensor::{ComplexMatrix, MultiPartyOperator, SlotStructure};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum Prob {
    Text(String),
    Number(f64),
}

impl Prob {
    fn value(&self, i: usize) -> Result<f64> {
        match self {
            Prob::Number(x) => Ok(*x),
            Prob::Text(s) => s
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::Schema(format!("probs[{i}]: {s:?} is not a decimal number"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum Source {
    Example1 { d: usize, m: usize },
    Example2 { d: usize, m: usize, s: usize, t: usize },
    Coarse { folds: usize },
    Direct { folds: usize },
}

impl From<Origin> for Source {
    fn from(o: Origin) -> Self {
        match o {
            Origin::Example1 { d, m } => Source::Example1 { d, m },
            Origin::Example2(p) => Source::Example2 {
                d: p.d,
                m: p.m,
                s: p.s,
                t: p.t,
            },
            Origin::Coarse { folds } => Source::Coarse { folds },
            Origin::Direct { folds } => Source::Direct { folds },
        }
    }
}

impl From<Source> for Origin {
    fn from(s: Source) -> Self {
        match s {
            Source::Example1 { d, m } => Origin::Example1 { d, m },
            Source::Example2 { d, m, s, t } => Origin::Example2(ExampleParams::new(d, m, s, t)),
            Source::Coarse { folds } => Origin::Coarse { folds },
            Source::Direct { folds } => Origin::Direct { folds },
        }
    }
}

type MatrixDoc = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EnsembleDoc {
    parties: Vec<String>,
    slot_dims: Vec<usize>,
    party_of_slot: Vec<usize>,
    probs: Vec<Prob>,
    states: Vec<MatrixDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    source: Option<Source>,
}

/// Rows of `[re, im]` pairs.
pub fn matrix_to_doc(m: &ComplexMatrix<f64>) -> Vec<Vec<[f64; 2]>> {
    (0..m.dim())
        .map(|r| m.row(r).iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

fn matrix_from_doc(doc: &MatrixDoc, what: &str) -> Result<ComplexMatrix<f64>> {
    let dim = doc.len();
    if dim == 0 {
        return Err(Error::Schema(format!("{what}: empty matrix")));
    }
    let mut data = Vec::with_capacity(dim * dim);
    for (r, row) in doc.iter().enumerate() {
        if row.len() != dim {
            return Err(Error::Schema(format!(
                "{what}: row {r} has {} entries, expected {dim}",
                row.len()
            )));
        }
        data.extend(row.iter().map(|&[re, im]| C::new(re, im)));
    }
    ComplexMatrix::from_vec(dim, data).map_err(|e| Error::Schema(format!("{what}: {e}")))
}

fn to_doc(e: &Ensemble<f64>) -> EnsembleDoc {
    let slots = e.slots();
    EnsembleDoc {
        parties: e.parties().labels().to_vec(),
        slot_dims: slots.slot_dims().to_vec(),
        party_of_slot: slots.party_of_slot().to_vec(),
        probs: e.probs().iter().map(|p| Prob::Text(format!("{p:?}"))).collect(),
        states: e.states().iter().map(|s| matrix_to_doc(s.matrix())).collect(),
        source: e.origin().map(Source::from),
    }
}

fn from_doc(doc: EnsembleDoc) -> Result<Ensemble<f64>> {
    let parties = PartySet::new(doc.parties)?;
    let slots = SlotStructure::new(doc.slot_dims, doc.party_of_slot)?;
    let probs = doc
        .probs
        .iter()
        .enumerate()
        .map(|(i, p)| p.value(i))
        .collect::<Result<Vec<_>>>()?;
    let states = doc
        .states
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let m = matrix_from_doc(s, &format!("states[{i}]"))?;
            if m.dim() != slots.dim() {
                return Err(Error::Schema(format!(
                    "states[{i}] is {}-dimensional but the slots give {}",
                    m.dim(),
                    slots.dim()
                )));
            }
            MultiPartyOperator::new(m, slots.clone())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Ensemble::new(parties, probs, states)?.with_origin(doc.source.map(Origin::from)))
}

pub fn ensemble_to_string(e: &Ensemble<f64>) -> Result<String> {
    Ok(serde_json::to_string(&to_doc(e))?)
}

/// Parses and validates; invariant violations are rejected with diagnostics.
pub fn ensemble_from_str(text: &str) -> Result<Ensemble<f64>> {
    let doc: EnsembleDoc = serde_json::from_str(text)?;
    from_doc(doc)
}

pub fn save(e: &Ensemble<f64>, mut sink: impl Write) -> Result<()> {
    serde_json::to_writer(&mut sink, &to_doc(e))?;
    sink.write_all(b"\n")?;
    Ok(())
}

pub fn load(mut source: impl Read) -> Result<Ensemble<f64>> {
    let mut text = String::new();
    source.read_to_string(&mut text)?;
    ensemble_from_str(&text)
}

pub fn save_path(e: &Ensemble<f64>, path: impl AsRef<Path>) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(file);
    save(e, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn load_path(path: impl AsRef<Path>) -> Result<Ensemble<f64>> {
    load(std::fs::File::open(path)?)
}

/// Serialized form of a [`DiscriminationResult`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResultDoc {
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
    pub certified: bool,
    pub method: String,
    pub certificate_min_eigs: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub povm: Option<Vec<MatrixDoc>>,
}

impl ResultDoc {
    pub fn new(r: &DiscriminationResult<f64>, include_povm: bool) -> Self {
        use crate::discrimination::Method;
        let method = match r.method {
            Method::Dominant { pivot } => format!("dominant:{pivot}"),
            Method::ClosedForm => "closed_form".to_string(),
            Method::Iterative { iterations } => format!("iterative:{iterations}"),
        };
        Self {
            primal: r.primal_value,
            dual: r.dual_value,
            gap: r.gap,
            certified: r.certified,
            method,
            certificate_min_eigs: r.certificate_min_eigs.clone(),
            povm: include_povm.then(|| r.povm.elements().iter().map(|m| matrix_to_doc(m.matrix())).collect()),
        }
    }
}
