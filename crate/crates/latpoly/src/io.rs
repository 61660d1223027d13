//! JSON file formats for lattices, polynomials, value tables, and variadic
//! families.
//!
//! Lattice file:
//!
//! ```json
//! {"elements": ["0", "a", "1"], "covers": [[0, 1], [1, 2]]}
//! ```
//!
//! Function files (`PolyFile`, `TableFile`, `VariadicFile`) carry an optional
//! `"lattice"` field holding either an inline lattice object, a path to a
//! lattice file (relative paths resolve against the referencing file's
//! directory), or a shorthand such as `chain:3`. When a lattice is also
//! supplied externally (the CLI's `--lattice`), the two must present the
//! same elements and covers.
//!
//! Polynomial coefficient maps are keyed by subset strings: `""` is the
//! empty set, `"13"` is {x1, x3}, digits strictly ascending; every subset of
//! the variable set must be present. Table values are element names in
//! lexicographic tuple order.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assoc::{AssocError, VariadicFn, VariadicPolynomial};
use crate::lattice::{Lattice, LatticeError};
use crate::poly::{FunctionTable, PolyError, PolynomialFn};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Assoc(#[from] AssocError),
    #[error("no lattice given: the file has no \"lattice\" field and none was supplied")]
    MissingLattice,
    #[error("the file's lattice does not match the externally supplied one")]
    LatticeMismatch,
    #[error("bad coefficient key {0:?}: keys are strictly ascending variable digits within the arity, \"\" for the empty set")]
    BadAlphaKey(String),
    #[error("coefficient map is missing an entry for subset {0:?}")]
    MissingAlphaEntry(String),
}

/// A lattice presented by element names and cover pairs (indices into
/// `elements`, lower element first).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeFile {
    pub elements: Vec<String>,
    pub covers: Vec<(usize, usize)>,
}

impl LatticeFile {
    pub fn from_lattice(l: &Lattice) -> Self {
        LatticeFile {
            elements: l.element_names().to_vec(),
            covers: l.cover_pairs(),
        }
    }

    pub fn to_lattice(&self) -> Result<Lattice, IoError> {
        Ok(Lattice::from_covers(&self.elements, &self.covers)?)
    }
}

/// The `"lattice"` field of a function file: inline, or a path/shorthand.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LatticeRef {
    Inline(LatticeFile),
    Spec(String),
}

impl LatticeRef {
    /// Resolves to a lattice; `base` anchors relative paths.
    pub fn resolve(&self, base: Option<&Path>) -> Result<Lattice, IoError> {
        match self {
            LatticeRef::Inline(file) => file.to_lattice(),
            LatticeRef::Spec(s) => {
                if let Some(built) = Lattice::from_shorthand(s) {
                    return Ok(built?);
                }
                let mut path = PathBuf::from(s);
                if path.is_relative() {
                    if let Some(base) = base {
                        path = base.join(path);
                    }
                }
                load_lattice_file(&path)
            }
        }
    }
}

/// Loads a lattice from a shorthand (`chain:3`, `boolean:2`,
/// `product:<spec>,<spec>`) or a lattice file path.
pub fn load_lattice_spec(spec: &str) -> Result<Lattice, IoError> {
    if let Some(built) = Lattice::from_shorthand(spec) {
        return Ok(built?);
    }
    load_lattice_file(Path::new(spec))
}

pub fn load_lattice_file(path: &Path) -> Result<Lattice, IoError> {
    let file: LatticeFile = read_json(path)?;
    file.to_lattice()
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, IoError> {
    let text = fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| IoError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

fn resolve_lattice(
    file_ref: Option<&LatticeRef>,
    external: Option<&Lattice>,
    base: Option<&Path>,
) -> Result<Lattice, IoError> {
    match (file_ref, external) {
        (Some(r), Some(l)) => {
            let from_file = r.resolve(base)?;
            if !from_file.same_presentation(l) {
                return Err(IoError::LatticeMismatch);
            }
            Ok(l.clone())
        }
        (Some(r), None) => r.resolve(base),
        (None, Some(l)) => Ok(l.clone()),
        (None, None) => Err(IoError::MissingLattice),
    }
}

/// Subset bitmask -> key string: ascending variable digits, `""` for the
/// empty set. Bit i stands for variable x_{i+1}.
pub fn subset_key(mask: usize) -> String {
    let mut s = String::new();
    let mut m = mask;
    let mut var = 1usize;
    while m != 0 {
        if m & 1 == 1 {
            s.push_str(&var.to_string());
        }
        m >>= 1;
        var += 1;
    }
    s
}

fn key_subset(key: &str, arity: usize) -> Result<usize, IoError> {
    let mut mask = 0usize;
    let mut last = 0u32;
    for ch in key.chars() {
        let d = ch
            .to_digit(10)
            .filter(|&d| d >= 1 && d as usize <= arity && d > last)
            .ok_or_else(|| IoError::BadAlphaKey(key.to_string()))?;
        mask |= 1 << (d - 1);
        last = d;
    }
    Ok(mask)
}

/// A polynomial as its coefficient map.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<LatticeRef>,
    pub arity: usize,
    pub alpha: BTreeMap<String, String>,
}

impl PolyFile {
    pub fn from_polynomial(f: &PolynomialFn, include_lattice: bool) -> Self {
        let l = f.lattice();
        let mut alpha = BTreeMap::new();
        for mask in 0..1usize << f.arity() {
            alpha.insert(subset_key(mask), l.name(f.coefficient(mask)).to_string());
        }
        PolyFile {
            lattice: include_lattice.then(|| LatticeRef::Inline(LatticeFile::from_lattice(l))),
            arity: f.arity(),
            alpha,
        }
    }

    /// Builds the polynomial over a resolved lattice; `base` anchors
    /// relative lattice paths, `external` is a lattice supplied from outside
    /// the file (must match the file's own, if both are present).
    pub fn into_polynomial(
        &self,
        external: Option<&Lattice>,
        base: Option<&Path>,
    ) -> Result<PolynomialFn, IoError> {
        let l = resolve_lattice(self.lattice.as_ref(), external, base)?;
        if self.arity == 0 || self.arity > crate::poly::MAX_ARITY {
            return Err(IoError::Poly(PolyError::ArityOutOfRange(self.arity)));
        }
        for key in self.alpha.keys() {
            key_subset(key, self.arity)?;
        }
        let mut alpha = Vec::with_capacity(1 << self.arity);
        for mask in 0..1usize << self.arity {
            let key = subset_key(mask);
            let name = self
                .alpha
                .get(&key)
                .ok_or(IoError::MissingAlphaEntry(key))?;
            alpha.push(l.element_named(name)?);
        }
        Ok(PolynomialFn::new(&l, self.arity, &alpha)?)
    }
}

/// An arbitrary function as its full value table, lexicographic tuple order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<LatticeRef>,
    pub arity: usize,
    pub values: Vec<String>,
}

impl TableFile {
    pub fn from_table(t: &FunctionTable, include_lattice: bool) -> Self {
        let l = t.lattice();
        TableFile {
            lattice: include_lattice.then(|| LatticeRef::Inline(LatticeFile::from_lattice(l))),
            arity: t.arity(),
            values: t.values().map(|e| l.name(e).to_string()).collect(),
        }
    }

    pub fn into_table(
        &self,
        external: Option<&Lattice>,
        base: Option<&Path>,
    ) -> Result<FunctionTable, IoError> {
        let l = resolve_lattice(self.lattice.as_ref(), external, base)?;
        let mut values = Vec::with_capacity(self.values.len());
        for name in &self.values {
            values.push(l.element_named(name)?);
        }
        Ok(FunctionTable::new(&l, self.arity, &values)?)
    }
}

/// An associative variadic family by its six parameters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariadicFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<LatticeRef>,
    pub a1: String,
    pub d1: String,
    pub a2: String,
    pub b2: String,
    pub c2: String,
    pub d2: String,
}

impl VariadicFile {
    pub fn from_family(g: &VariadicPolynomial, include_lattice: bool) -> Self {
        let l = g.lattice();
        let p = g.nary_params();
        VariadicFile {
            lattice: include_lattice.then(|| LatticeRef::Inline(LatticeFile::from_lattice(l))),
            a1: l.name(g.a1()).to_string(),
            d1: l.name(g.d1()).to_string(),
            a2: l.name(p.a).to_string(),
            b2: l.name(p.b).to_string(),
            c2: l.name(p.c).to_string(),
            d2: l.name(p.d).to_string(),
        }
    }

    pub fn into_family(
        &self,
        external: Option<&Lattice>,
        base: Option<&Path>,
    ) -> Result<VariadicPolynomial, IoError> {
        let l = resolve_lattice(self.lattice.as_ref(), external, base)?;
        Ok(VariadicPolynomial::new(
            &l,
            l.element_named(&self.a1)?,
            l.element_named(&self.d1)?,
            l.element_named(&self.a2)?,
            l.element_named(&self.b2)?,
            l.element_named(&self.c2)?,
            l.element_named(&self.d2)?,
        )?)
    }
}

/// Loads a polynomial file; `external` is a lattice given from outside.
pub fn load_poly(path: &Path, external: Option<&Lattice>) -> Result<PolynomialFn, IoError> {
    let file: PolyFile = read_json(path)?;
    file.into_polynomial(external, path.parent())
}

pub fn load_table(path: &Path, external: Option<&Lattice>) -> Result<FunctionTable, IoError> {
    let file: TableFile = read_json(path)?;
    file.into_table(external, path.parent())
}

pub fn load_variadic(
    path: &Path,
    external: Option<&Lattice>,
) -> Result<VariadicPolynomial, IoError> {
    let file: VariadicFile = read_json(path)?;
    file.into_family(external, path.parent())
}
