//! Lattice polynomial functions and the decision procedures around them.
//!
//! A polynomial function is stored as its coefficient map `alpha`: for each
//! subset I of variable positions (a bitmask), an element of the lattice. The
//! function it denotes is
//!
//! ```text
//!     f(x) = \/_I ( alpha(I) /\ (/\_{i in I} xi) )
//! ```
//!
//! where the empty meet is top, so the I = {} term contributes `alpha({})`.
//! The representation is not unique; the canonical map `alpha_can(I) =
//! \/_{J ⊆ I} alpha(J)` is, and two polynomials denote the same function
//! exactly when their canonical maps agree.
//!
//! [`FunctionTable`] is the extensional side: an arbitrary function given by
//! its full value table, against which polynomiality is decided either by
//! rebuilding from the characteristic vectors ([`FunctionTable::to_polynomial`])
//! or by the slicewise median identity ([`FunctionTable::is_polynomial_median`]).

use std::fmt;

use thiserror::Error;

use crate::lattice::{Element, Lattice};
use crate::Verdict;

/// Arity cap for polynomial coefficient maps (2^n coefficients).
pub const MAX_ARITY: usize = 6;

/// Cap on materialized table entries (|L|^n).
pub const MAX_TABLE_ENTRIES: usize = 1 << 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("arity {0} is out of range (1..={MAX_ARITY})")]
    ArityOutOfRange(usize),
    #[error("coefficient map must have {expected} entries, got {got}")]
    WrongAlphaLength { expected: usize, got: usize },
    #[error("value table must have {expected} entries, got {got}")]
    WrongTableLength { expected: usize, got: usize },
    #[error("table would have {0} entries, more than the supported {MAX_TABLE_ENTRIES}")]
    TableTooLarge(usize),
    #[error("expected a tuple of length {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("element does not belong to this function's lattice")]
    ForeignElement,
}

/// Why a table was rejected as non-polynomial: the polynomial rebuilt from
/// the table's values at characteristic vectors disagrees with the table at
/// `witness` (the lexicographically smallest such tuple).
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{message}")]
pub struct NotPolynomial {
    pub witness: Vec<Element>,
    pub table_value: Element,
    pub rebuilt_value: Element,
    message: String,
}

/// Counterexample to the median identity `t(xyz) = med(t(x0z), y, t(x1z))`:
/// the identity fails at `tuple` when y is the entry in position `slot`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MedianWitness {
    pub tuple: Vec<Element>,
    pub slot: usize,
    pub expected: Element,
    pub got: Element,
}

impl MedianWitness {
    pub fn render(&self, l: &Lattice) -> String {
        format!(
            "tuple {} slot {}: med gives {} but the table holds {}",
            l.format_tuple(&self.tuple),
            self.slot + 1,
            l.name(self.expected),
            l.name(self.got),
        )
    }
}

/// A lattice polynomial function of fixed arity, as a coefficient map.
#[derive(Clone)]
pub struct PolynomialFn {
    lattice: Lattice,
    arity: usize,
    /// `alpha[mask]` with bit i of `mask` standing for variable x_{i+1}.
    alpha: Vec<u8>,
}

impl fmt::Debug for PolynomialFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PolynomialFn")
            .field("lattice", &self.lattice.label())
            .field("arity", &self.arity)
            .field("alpha", &self.alpha)
            .finish()
    }
}

impl PolynomialFn {
    /// Builds a polynomial from its coefficient map, given in mask order
    /// (index I runs over all `2^arity` bitmasks).
    pub fn new(lattice: &Lattice, arity: usize, alpha: &[Element]) -> Result<Self, PolyError> {
        check_arity(arity)?;
        if alpha.len() != 1 << arity {
            return Err(PolyError::WrongAlphaLength {
                expected: 1 << arity,
                got: alpha.len(),
            });
        }
        let mut raw = Vec::with_capacity(alpha.len());
        for &e in alpha {
            if !lattice.owns(e) {
                return Err(PolyError::ForeignElement);
            }
            raw.push(e.idx());
        }
        Ok(Self::from_alpha_u(lattice.clone(), arity, raw))
    }

    pub(crate) fn from_alpha_u(lattice: Lattice, arity: usize, alpha: Vec<u8>) -> Self {
        debug_assert_eq!(alpha.len(), 1 << arity);
        debug_assert!(alpha.iter().all(|&a| (a as usize) < lattice.size()));
        PolynomialFn {
            lattice,
            arity,
            alpha,
        }
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// The coefficient for the variable set given as a bitmask (bit i is
    /// variable x_{i+1}). Panics if the mask has bits beyond the arity.
    pub fn coefficient(&self, mask: usize) -> Element {
        assert!(mask < self.alpha.len(), "mask {mask:#b} out of range");
        self.lattice.el(self.alpha[mask])
    }

    pub(crate) fn alpha_u(&self) -> &[u8] {
        &self.alpha
    }

    pub fn eval(&self, xs: &[Element]) -> Result<Element, PolyError> {
        if xs.len() != self.arity {
            return Err(PolyError::ArityMismatch {
                expected: self.arity,
                got: xs.len(),
            });
        }
        let mut raw = [0u8; MAX_ARITY];
        for (i, &x) in xs.iter().enumerate() {
            if !self.lattice.owns(x) {
                return Err(PolyError::ForeignElement);
            }
            raw[i] = x.idx();
        }
        Ok(self.lattice.el(self.eval_u(&raw[..self.arity])))
    }

    pub(crate) fn eval_u(&self, xs: &[u8]) -> u8 {
        let l = &self.lattice;
        let bottom = l.bottom_u();
        let mut acc = bottom;
        for (mask, &coef) in self.alpha.iter().enumerate() {
            let mut term = coef;
            let mut m = mask;
            while m != 0 && term != bottom {
                let i = m.trailing_zeros() as usize;
                m &= m - 1;
                term = l.meet_u(term, xs[i]);
            }
            acc = l.join_u(acc, term);
        }
        acc
    }

    /// The same function with the canonical coefficient map
    /// `alpha_can(I) = \/_{J ⊆ I} alpha(J)`.
    pub fn canonical(&self) -> PolynomialFn {
        let l = &self.lattice;
        let mut acc = self.alpha.clone();
        for i in 0..self.arity {
            let bit = 1usize << i;
            for mask in 0..acc.len() {
                if mask & bit != 0 {
                    acc[mask] = l.join_u(acc[mask], acc[mask ^ bit]);
                }
            }
        }
        PolynomialFn {
            lattice: l.clone(),
            arity: self.arity,
            alpha: acc,
        }
    }

    /// The minimal coefficient map: keeps `alpha_can(I)` only where it
    /// strictly exceeds the join of all proper-subset coefficients, and puts
    /// bottom everywhere else. Evaluates identically to `self`.
    pub fn minimal(&self) -> PolynomialFn {
        let l = &self.lattice;
        let can = self.canonical().alpha;
        let bottom = l.bottom_u();
        let mut min = vec![bottom; can.len()];
        for mask in 0..can.len() {
            // The canonical map is monotone in I, so the join over all
            // proper subsets equals the join over the one-bit-removed ones.
            let mut lower = bottom;
            let mut m = mask;
            while m != 0 {
                let i = m.trailing_zeros() as usize;
                m &= m - 1;
                lower = l.join_u(lower, can[mask ^ (1 << i)]);
            }
            if lower != can[mask] {
                debug_assert!(l.leq_u(lower, can[mask]));
                min[mask] = can[mask];
            }
        }
        PolynomialFn {
            lattice: l.clone(),
            arity: self.arity,
            alpha: min,
        }
    }

    /// Materializes the full value table.
    pub fn table(&self) -> FunctionTable {
        FunctionTable::from_fn_u(self.lattice.clone(), self.arity, |xs| self.eval_u(xs))
            .expect("polynomial arity is within table limits")
    }

    /// True iff evaluation is invariant under every permutation of the
    /// arguments.
    pub fn is_symmetric(&self) -> bool {
        let size = self.lattice.size_u();
        let mut tuple = vec![0u8; self.arity];
        let mut sorted = vec![0u8; self.arity];
        loop {
            sorted.copy_from_slice(&tuple);
            sorted.sort_unstable();
            if self.eval_u(&tuple) != self.eval_u(&sorted) {
                return false;
            }
            if !next_tuple(&mut tuple, size) {
                return true;
            }
        }
    }

    /// True iff both polynomials denote the same function, decided by
    /// comparing canonical coefficient maps.
    ///
    /// Panics if the polynomials live on different lattices.
    pub fn equivalent(&self, other: &PolynomialFn) -> bool {
        assert!(
            self.lattice.same_presentation(&other.lattice),
            "cannot compare polynomials over different lattices"
        );
        self.arity == other.arity && self.canonical().alpha == other.canonical().alpha
    }
}

/// An arbitrary function `L^n -> L` given extensionally by its value table.
#[derive(Clone)]
pub struct FunctionTable {
    lattice: Lattice,
    arity: usize,
    /// Row-major lexicographic in element indices: the first coordinate is
    /// the most significant digit.
    values: Vec<u8>,
}

impl fmt::Debug for FunctionTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionTable")
            .field("lattice", &self.lattice.label())
            .field("arity", &self.arity)
            .field("values", &self.values)
            .finish()
    }
}

impl FunctionTable {
    pub fn new(lattice: &Lattice, arity: usize, values: &[Element]) -> Result<Self, PolyError> {
        let expected = table_len(lattice, arity)?;
        if values.len() != expected {
            return Err(PolyError::WrongTableLength {
                expected,
                got: values.len(),
            });
        }
        let mut raw = Vec::with_capacity(values.len());
        for &v in values {
            if !lattice.owns(v) {
                return Err(PolyError::ForeignElement);
            }
            raw.push(v.idx());
        }
        Ok(FunctionTable {
            lattice: lattice.clone(),
            arity,
            values: raw,
        })
    }

    /// Tabulates a function over all tuples, in lexicographic order.
    pub fn from_fn(
        lattice: &Lattice,
        arity: usize,
        mut f: impl FnMut(&[Element]) -> Element,
    ) -> Result<Self, PolyError> {
        let l = lattice.clone();
        let mut buf = Vec::with_capacity(arity);
        let mut foreign = false;
        let table = Self::from_fn_u(lattice.clone(), arity, |xs| {
            buf.clear();
            buf.extend(xs.iter().map(|&x| l.el(x)));
            let v = f(&buf);
            if l.owns(v) {
                v.idx()
            } else {
                foreign = true;
                0
            }
        })?;
        if foreign {
            return Err(PolyError::ForeignElement);
        }
        Ok(table)
    }

    pub(crate) fn from_fn_u(
        lattice: Lattice,
        arity: usize,
        mut f: impl FnMut(&[u8]) -> u8,
    ) -> Result<Self, PolyError> {
        let len = table_len(&lattice, arity)?;
        let mut values = Vec::with_capacity(len);
        let mut tuple = vec![0u8; arity];
        loop {
            values.push(f(&tuple));
            if !next_tuple(&mut tuple, lattice.size_u()) {
                break;
            }
        }
        debug_assert_eq!(values.len(), len);
        Ok(FunctionTable {
            lattice,
            arity,
            values,
        })
    }

    pub(crate) fn from_values_u(lattice: Lattice, arity: usize, values: Vec<u8>) -> Self {
        debug_assert_eq!(values.len(), table_len(&lattice, arity).unwrap());
        FunctionTable {
            lattice,
            arity,
            values,
        }
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, xs: &[Element]) -> Result<Element, PolyError> {
        if xs.len() != self.arity {
            return Err(PolyError::ArityMismatch {
                expected: self.arity,
                got: xs.len(),
            });
        }
        let mut index = 0usize;
        for &x in xs {
            if !self.lattice.owns(x) {
                return Err(PolyError::ForeignElement);
            }
            index = index * self.lattice.size() + x.index();
        }
        Ok(self.lattice.el(self.values[index]))
    }

    pub(crate) fn get_u(&self, xs: &[u8]) -> u8 {
        let size = self.lattice.size();
        let mut index = 0usize;
        for &x in xs {
            index = index * size + x as usize;
        }
        self.values[index]
    }

    pub(crate) fn values_u(&self) -> &[u8] {
        &self.values
    }

    /// Values in lexicographic tuple order.
    pub fn values(&self) -> impl Iterator<Item = Element> + '_ {
        self.values.iter().map(|&v| self.lattice.el(v))
    }

    /// Decides polynomiality by rebuilding: reads the candidate coefficients
    /// off the characteristic vectors, then re-evaluates everywhere. Returns
    /// the canonical polynomial on success, and the lexicographically
    /// smallest disagreeing tuple otherwise.
    pub fn to_polynomial(&self) -> Result<PolynomialFn, NotPolynomial> {
        let l = &self.lattice;
        let (bottom, top) = (l.bottom_u(), l.top_u());
        let mut alpha = vec![bottom; 1 << self.arity];
        let mut vec_buf = vec![bottom; self.arity];
        for (mask, slot) in alpha.iter_mut().enumerate() {
            for (i, v) in vec_buf.iter_mut().enumerate() {
                *v = if mask >> i & 1 == 1 { top } else { bottom };
            }
            *slot = self.get_u(&vec_buf);
        }
        let candidate = PolynomialFn::from_alpha_u(l.clone(), self.arity, alpha);

        let mut tuple = vec![0u8; self.arity];
        let mut index = 0usize;
        loop {
            let rebuilt = candidate.eval_u(&tuple);
            let actual = self.values[index];
            if rebuilt != actual {
                let witness: Vec<Element> = tuple.iter().map(|&t| l.el(t)).collect();
                let message = format!(
                    "not a polynomial function: at {} the table holds {} but the rebuilt polynomial gives {}",
                    l.format_tuple(&witness),
                    l.name(l.el(actual)),
                    l.name(l.el(rebuilt)),
                );
                return Err(NotPolynomial {
                    witness,
                    table_value: l.el(actual),
                    rebuilt_value: l.el(rebuilt),
                    message,
                });
            }
            index += 1;
            if !next_tuple(&mut tuple, l.size_u()) {
                break;
            }
        }
        Ok(candidate)
    }

    /// Decides polynomiality by the median identity: the table is a
    /// polynomial function iff `t(xyz) = med(t(x0z), y, t(x1z))` for every
    /// tuple and every slot. Scans tuples lexicographically, slots in
    /// ascending order, and reports the first failure.
    pub fn is_polynomial_median(&self) -> Verdict<MedianWitness> {
        let l = &self.lattice;
        let (bottom, top) = (l.bottom_u(), l.top_u());
        let mut tuple = vec![0u8; self.arity];
        loop {
            let got = self.get_u(&tuple);
            for slot in 0..self.arity {
                let y = tuple[slot];
                tuple[slot] = bottom;
                let at0 = self.get_u(&tuple);
                tuple[slot] = top;
                let at1 = self.get_u(&tuple);
                tuple[slot] = y;
                let expected = l.med_u(at0, y, at1);
                if expected != got {
                    return Verdict::Fails(MedianWitness {
                        tuple: tuple.iter().map(|&t| l.el(t)).collect(),
                        slot,
                        expected: l.el(expected),
                        got: l.el(got),
                    });
                }
            }
            if !next_tuple(&mut tuple, l.size_u()) {
                return Verdict::Holds;
            }
        }
    }

    /// True iff the table is componentwise nondecreasing.
    pub fn is_nondecreasing(&self) -> bool {
        // Raising one coordinate at a time reaches every dominating tuple.
        let l = &self.lattice;
        let size = l.size_u();
        let mut tuple = vec![0u8; self.arity];
        loop {
            let here = self.get_u(&tuple);
            for slot in 0..self.arity {
                let x = tuple[slot];
                for y in 0..size {
                    if y != x && l.leq_u(x, y) {
                        tuple[slot] = y;
                        let above = self.get_u(&tuple);
                        tuple[slot] = x;
                        if !l.leq_u(here, above) {
                            return false;
                        }
                    }
                }
            }
            if !next_tuple(&mut tuple, size) {
                return true;
            }
        }
    }

    /// True iff every unary section preserves meet and join, i.e. for every
    /// slot and fixed context, `s(y /\ y') = s(y) /\ s(y')` and dually.
    pub fn sections_preserve_lattice_ops(&self) -> bool {
        let l = &self.lattice;
        let size = l.size_u();
        let mut tuple = vec![0u8; self.arity];
        loop {
            // Treat `tuple` as the context for each slot in turn; the value
            // currently in the slot is ignored by fixing y, y' explicitly.
            for slot in 0..self.arity {
                let saved = tuple[slot];
                if saved != 0 {
                    continue; // visit each context once
                }
                for y in 0..size {
                    for yp in 0..y {
                        let section = |v: u8, t: &mut Vec<u8>| {
                            t[slot] = v;
                            self.get_u(t)
                        };
                        let sy = section(y, &mut tuple);
                        let syp = section(yp, &mut tuple);
                        let s_meet = section(l.meet_u(y, yp), &mut tuple);
                        let s_join = section(l.join_u(y, yp), &mut tuple);
                        if s_meet != l.meet_u(sy, syp) || s_join != l.join_u(sy, syp) {
                            tuple[slot] = saved;
                            return false;
                        }
                    }
                }
                tuple[slot] = saved;
            }
            if !next_tuple(&mut tuple, size) {
                return true;
            }
        }
    }

    /// True iff the range of every unary section is a convex subset.
    pub fn section_ranges_convex(&self) -> bool {
        let l = &self.lattice;
        let size = l.size_u();
        let mut tuple = vec![0u8; self.arity];
        loop {
            for slot in 0..self.arity {
                if tuple[slot] != 0 {
                    continue;
                }
                let mut range = 0u64;
                for y in 0..size {
                    tuple[slot] = y;
                    range |= 1 << self.get_u(&tuple);
                }
                tuple[slot] = 0;
                if !l.is_convex_mask(range) {
                    return false;
                }
            }
            if !next_tuple(&mut tuple, size) {
                return true;
            }
        }
    }

    /// True iff the full range of the table is a convex subset.
    pub fn range_convex(&self) -> bool {
        let mut range = 0u64;
        for &v in &self.values {
            range |= 1 << v;
        }
        self.lattice.is_convex_mask(range)
    }

    /// True iff feeding the output back into any slot is a fixpoint:
    /// `t(x t(xyz) z) = t(xyz)` for all tuples and slots.
    pub fn sections_idempotent(&self) -> bool {
        let size = self.lattice.size_u();
        let mut tuple = vec![0u8; self.arity];
        loop {
            let v = self.get_u(&tuple);
            for slot in 0..self.arity {
                let y = tuple[slot];
                tuple[slot] = v;
                let again = self.get_u(&tuple);
                tuple[slot] = y;
                if again != v {
                    return false;
                }
            }
            if !next_tuple(&mut tuple, size) {
                return true;
            }
        }
    }
}

fn check_arity(arity: usize) -> Result<(), PolyError> {
    if (1..=MAX_ARITY).contains(&arity) {
        Ok(())
    } else {
        Err(PolyError::ArityOutOfRange(arity))
    }
}

fn table_len(lattice: &Lattice, arity: usize) -> Result<usize, PolyError> {
    check_arity(arity)?;
    let len = lattice.size().pow(arity as u32);
    if len > MAX_TABLE_ENTRIES {
        return Err(PolyError::TableTooLarge(len));
    }
    Ok(len)
}

/// Advances a base-`size` odometer to the lexicographically next tuple.
/// Returns false after the last tuple (all digits `size - 1`).
pub(crate) fn next_tuple(tuple: &mut [u8], size: u8) -> bool {
    for digit in tuple.iter_mut().rev() {
        if *digit + 1 < size {
            *digit += 1;
            return true;
        }
        *digit = 0;
    }
    false
}

/// Number of `arity`-tuples over a `size`-element carrier.
pub(crate) fn tuple_count(size: usize, arity: usize) -> usize {
    size.pow(arity as u32)
}
