//! n-ary and variadic associativity: deciding it, and the explicit normal
//! forms of associative polynomial functions.
//!
//! For an n-ary function, associativity means: in any word of length 2n-1,
//! collapsing the inner block of n consecutive letters to its value gives
//! the same result no matter where the block starts. Every associative
//! polynomial function takes the four-parameter form
//!
//! ```text
//!     f(x) = a \/ (b /\ x1) \/ \/_i (b /\ c /\ xi) \/ (c /\ xn) \/ (d /\ /\_i xi)
//! ```
//!
//! with a = f(0..0), b = f(1,0..0), c = f(0..0,1), d = f(1..1). A variadic
//! family (g_n) of polynomial functions, one shared parameter quadruple for
//! all n >= 2 plus a unary part g1(x) = a1 \/ (d1 /\ x), is associative
//! exactly when a1 <= a2 and d2 <= d1.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::lattice::{Element, Lattice};
use crate::poly::{next_tuple, FunctionTable, PolyError, PolynomialFn, MAX_ARITY};
use crate::Verdict;

/// Default evaluation budget for the exhaustive checkers.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AssocError {
    #[error("check needs about {needed} evaluations, over the budget of {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("empty words have no value; evaluation needs at least one letter")]
    EmptyWord,
    #[error("family constraint violated: {0}")]
    IncompatibleFamily(String),
    #[error("the function is not associative")]
    NotAssociative(NaryWitness),
    #[error("word of length {len} exceeds the family's maximum arity {cap}")]
    WordTooLong { len: usize, cap: usize },
    #[error("maxlen {0} is out of range (must be at least 2)")]
    MaxlenTooSmall(usize),
    #[error("component {index} must have arity {index} but has arity {arity}")]
    BadComponentArity { index: usize, arity: usize },
    #[error("components live on different lattices")]
    MixedLattices,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Counterexample to n-ary associativity: collapsing the inner block of
/// `word` at `pos_a` and at `pos_b` yields different values. For unary
/// functions both positions are 0 and the failing identity is
/// `f(f(x)) = f(x)` with `value_a = f(f(x))`, `value_b = f(x)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NaryWitness {
    pub word: Vec<Element>,
    pub pos_a: usize,
    pub pos_b: usize,
    pub value_a: Element,
    pub value_b: Element,
}

impl NaryWitness {
    pub fn render(&self, l: &Lattice) -> String {
        format!(
            "word {}: collapsing at position {} gives {}, at position {} gives {}",
            l.format_tuple(&self.word),
            self.pos_a,
            l.name(self.value_a),
            self.pos_b,
            l.name(self.value_b),
        )
    }
}

/// Counterexample to variadic associativity: for the split of `word` after
/// `split` letters, evaluating the two halves first gives `lhs`, but the
/// whole word evaluates to `rhs`. A split of 0 is the degenerate check
/// `g(g(w)) = g(w)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariadicWitness {
    pub word: Vec<Element>,
    pub split: usize,
    pub lhs: Element,
    pub rhs: Element,
}

impl VariadicWitness {
    pub fn render(&self, l: &Lattice) -> String {
        format!(
            "word {} split after {} letter(s): evaluating the halves first gives {}, the whole word gives {}",
            l.format_tuple(&self.word),
            self.split,
            l.name(self.lhs),
            l.name(self.rhs),
        )
    }
}

/// Counterexample to a segment identity: replacing `word[start..end]` by a
/// single letter (the segment's value, or the whole word's value, depending
/// on the checker) changes the result from `rhs` to `lhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentWitness {
    pub word: Vec<Element>,
    pub start: usize,
    pub end: usize,
    pub lhs: Element,
    pub rhs: Element,
}

impl SegmentWitness {
    pub fn render(&self, l: &Lattice) -> String {
        format!(
            "word {} segment [{}..{}): rewriting the segment gives {}, the whole word gives {}",
            l.format_tuple(&self.word),
            self.start,
            self.end,
            l.name(self.lhs),
            l.name(self.rhs),
        )
    }
}

/// Counterexample to a repetition identity (`reps` copies).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerWitness {
    pub word: Vec<Element>,
    pub reps: usize,
    pub lhs: Element,
    pub rhs: Element,
}

impl PowerWitness {
    pub fn render(&self, l: &Lattice) -> String {
        format!(
            "word {} with {} repetition(s): {} instead of {}",
            l.format_tuple(&self.word),
            self.reps,
            l.name(self.lhs),
            l.name(self.rhs),
        )
    }
}

/// The four parameters of the n-ary normal form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AssocParams {
    pub a: Element,
    pub b: Element,
    pub c: Element,
    pub d: Element,
}

impl AssocParams {
    pub fn new(a: Element, b: Element, c: Element, d: Element) -> Self {
        AssocParams { a, b, c, d }
    }

    /// (a, b, c, d) -> (a, a\/b, a\/c, a\/b\/c\/d). Idempotent, preserves
    /// the constructed function, and is the identity exactly on quadruples
    /// with a <= b /\ c and b \/ c <= d.
    pub fn normalized(&self, l: &Lattice) -> AssocParams {
        let b = l.join(self.a, self.b);
        let c = l.join(self.a, self.c);
        let d = l.join(l.join(b, c), self.d);
        AssocParams {
            a: self.a,
            b,
            c,
            d,
        }
    }

    pub fn is_normalized(&self, l: &Lattice) -> bool {
        *self == self.normalized(l)
    }

    fn to_u(self, l: &Lattice) -> Result<[u8; 4], AssocError> {
        for e in [self.a, self.b, self.c, self.d] {
            if !l.owns(e) {
                return Err(AssocError::Poly(PolyError::ForeignElement));
            }
        }
        Ok([self.a.idx(), self.b.idx(), self.c.idx(), self.d.idx()])
    }
}

/// Builds the n-ary normal form for the (first normalized) parameters and
/// returns it with canonical coefficients.
pub fn construct_nary(l: &Lattice, n: usize, p: AssocParams) -> Result<PolynomialFn, AssocError> {
    construct_from(l, n, p.normalized(l))
}

/// Same construction without normalizing first; used to confirm that
/// normalization does not change the function.
pub(crate) fn construct_from(
    l: &Lattice,
    n: usize,
    p: AssocParams,
) -> Result<PolynomialFn, AssocError> {
    if !(1..=MAX_ARITY).contains(&n) {
        return Err(AssocError::Poly(PolyError::ArityOutOfRange(n)));
    }
    let [a, b, c, d] = p.to_u(l)?;
    let bc = l.meet_u(b, c);
    let mut alpha = vec![l.bottom_u(); 1 << n];
    alpha[0] = a;
    alpha[1] = l.join_u(alpha[1], b);
    for i in 0..n {
        alpha[1 << i] = l.join_u(alpha[1 << i], bc);
    }
    alpha[1 << (n - 1)] = l.join_u(alpha[1 << (n - 1)], c);
    alpha[(1 << n) - 1] = l.join_u(alpha[(1 << n) - 1], d);
    Ok(PolynomialFn::from_alpha_u(l.clone(), n, alpha).canonical())
}

fn nary_check_cost(size: usize, n: usize) -> u128 {
    if n == 1 {
        return size as u128 * 2;
    }
    (size as u128).pow(2 * n as u32 - 1) * n as u128 * 2
}

/// Decides n-ary associativity by exhaustive scan, with the default budget.
pub fn is_associative_nary(t: &FunctionTable) -> Result<Verdict<NaryWitness>, AssocError> {
    is_associative_nary_budgeted(t, DEFAULT_BUDGET)
}

/// Decides n-ary associativity: every word w of length 2n-1 must evaluate
/// the same under `t(w[..i], t(w[i..i+n]), w[i+n..])` for every block
/// position i. For n=1 the condition is `t(t(x)) = t(x)`. Scans words
/// lexicographically (in element index order) and positions in ascending
/// pairs, reporting the least counterexample.
pub fn is_associative_nary_budgeted(
    t: &FunctionTable,
    budget: u64,
) -> Result<Verdict<NaryWitness>, AssocError> {
    let l = t.lattice();
    let n = t.arity();
    let needed = nary_check_cost(l.size(), n);
    if needed > budget as u128 {
        return Err(AssocError::BudgetExceeded { needed, budget });
    }

    if n == 1 {
        for x in 0..l.size_u() {
            let once = t.get_u(&[x]);
            let twice = t.get_u(&[once]);
            if twice != once {
                return Ok(Verdict::Fails(NaryWitness {
                    word: vec![l.el(x)],
                    pos_a: 0,
                    pos_b: 0,
                    value_a: l.el(twice),
                    value_b: l.el(once),
                }));
            }
        }
        return Ok(Verdict::Holds);
    }

    let mut word = vec![0u8; 2 * n - 1];
    let mut collapsed = vec![0u8; n];
    let mut values = vec![0u8; n];
    loop {
        for (pos, value) in values.iter_mut().enumerate() {
            let inner = t.get_u(&word[pos..pos + n]);
            collapsed[..pos].copy_from_slice(&word[..pos]);
            collapsed[pos] = inner;
            collapsed[pos + 1..].copy_from_slice(&word[pos + n..]);
            *value = t.get_u(&collapsed);
        }
        for i in 0..n {
            for j in i + 1..n {
                if values[i] != values[j] {
                    return Ok(Verdict::Fails(NaryWitness {
                        word: word.iter().map(|&x| l.el(x)).collect(),
                        pos_a: i,
                        pos_b: j,
                        value_a: l.el(values[i]),
                        value_b: l.el(values[j]),
                    }));
                }
            }
        }
        if !next_tuple(&mut word, l.size_u()) {
            return Ok(Verdict::Holds);
        }
    }
}

/// Classifies an associative polynomial function by its four corner values,
/// with the default budget.
pub fn classify_nary(f: &PolynomialFn) -> Result<AssocParams, AssocError> {
    classify_nary_budgeted(f, DEFAULT_BUDGET)
}

/// Checks associativity, then reads a = f(0..0), b = f(1,0..0),
/// c = f(0..0,1), d = f(1..1) and verifies that the normal form built from
/// them reproduces f.
///
/// Panics if the rebuilt normal form disagrees with f; that would contradict
/// the classification of associative polynomial functions over a bounded
/// distributive lattice and indicates a bug.
pub fn classify_nary_budgeted(
    f: &PolynomialFn,
    budget: u64,
) -> Result<AssocParams, AssocError> {
    let table = f.table();
    if let Verdict::Fails(w) = is_associative_nary_budgeted(&table, budget)? {
        return Err(AssocError::NotAssociative(w));
    }
    let l = f.lattice();
    let n = f.arity();
    let (bot, top) = (l.bottom_u(), l.top_u());
    let mut w = vec![bot; n];
    let a = table.get_u(&w);
    w[0] = top;
    let b = table.get_u(&w);
    w[0] = bot;
    w[n - 1] = top;
    let c = table.get_u(&w);
    let d = table.get_u(&vec![top; n]);
    let params = AssocParams {
        a: l.el(a),
        b: l.el(b),
        c: l.el(c),
        d: l.el(d),
    }
    .normalized(l);
    let rebuilt = construct_nary(l, n, params)?;
    assert!(
        rebuilt.canonical().alpha_u() == f.canonical().alpha_u(),
        "associative polynomial function does not match its corner-value normal form"
    );
    Ok(params)
}

/// All associative polynomial functions of the given arity, enumerated
/// through their normal-form parameters: quadruples with a <= b /\ c and
/// b \/ c <= d, deduplicated by canonical coefficients, each verified
/// associative. Sorted by canonical coefficient map; each function is paired
/// with the least quadruple that produces it.
pub fn enumerate_associative_nary(
    l: &Lattice,
    n: usize,
    budget: u64,
) -> Result<Vec<(AssocParams, PolynomialFn)>, AssocError> {
    if !(1..=MAX_ARITY).contains(&n) {
        return Err(AssocError::Poly(PolyError::ArityOutOfRange(n)));
    }
    let size = l.size_u();
    let mut distinct: BTreeMap<Vec<u8>, AssocParams> = BTreeMap::new();
    let mut quad = [0u8; 4];
    loop {
        let [a, b, c, d] = quad;
        if l.leq_u(a, l.meet_u(b, c)) && l.leq_u(l.join_u(b, c), d) {
            let params = AssocParams {
                a: l.el(a),
                b: l.el(b),
                c: l.el(c),
                d: l.el(d),
            };
            let f = construct_from(l, n, params)?;
            distinct.entry(f.alpha_u().to_vec()).or_insert(params);
        }
        if !next_tuple(&mut quad, size) {
            break;
        }
    }
    let per_check = nary_check_cost(l.size(), n);
    let needed = per_check * distinct.len() as u128;
    if needed > budget as u128 {
        return Err(AssocError::BudgetExceeded { needed, budget });
    }
    let mut out = Vec::with_capacity(distinct.len());
    for (alpha, params) in distinct {
        let f = PolynomialFn::from_alpha_u(l.clone(), n, alpha);
        let verdict = is_associative_nary_budgeted(&f.table(), budget)?;
        debug_assert!(verdict.holds(), "normal-form member failed the scan");
        if verdict.holds() {
            out.push((params, f));
        }
    }
    Ok(out)
}

/// Evaluates the symmetric median rewriting of the n-ary normal form:
/// `med(a, (b /\ x1) \/ med(/\x, b /\ c, \/x) \/ (c /\ xn), d)` with the
/// parameters normalized first. Agrees with the normal form everywhere.
pub fn symmetric_median_form(
    l: &Lattice,
    p: AssocParams,
    xs: &[Element],
) -> Result<Element, AssocError> {
    if xs.is_empty() {
        return Err(AssocError::EmptyWord);
    }
    let [a, b, c, d] = p.normalized(l).to_u(l)?;
    let mut meet_all = xs[0].idx();
    let mut join_all = xs[0].idx();
    for &x in xs {
        if !l.owns(x) {
            return Err(AssocError::Poly(PolyError::ForeignElement));
        }
        meet_all = l.meet_u(meet_all, x.idx());
        join_all = l.join_u(join_all, x.idx());
    }
    let bc = l.meet_u(b, c);
    let mid = l.join_u(
        l.join_u(
            l.meet_u(b, xs[0].idx()),
            l.med_u(meet_all, bc, join_all),
        ),
        l.meet_u(c, xs[xs.len() - 1].idx()),
    );
    Ok(l.el(l.med_u(a, mid, d)))
}

/// The shorter symmetric rewriting `med(a, med(/\x, b, \/x), d)`, valid when
/// b = c (which is exactly when the normal form is a symmetric function).
pub fn symmetric_median_form_reduced(
    l: &Lattice,
    p: AssocParams,
    xs: &[Element],
) -> Result<Element, AssocError> {
    if xs.is_empty() {
        return Err(AssocError::EmptyWord);
    }
    let [a, b, _, d] = p.normalized(l).to_u(l)?;
    let mut meet_all = xs[0].idx();
    let mut join_all = xs[0].idx();
    for &x in xs {
        if !l.owns(x) {
            return Err(AssocError::Poly(PolyError::ForeignElement));
        }
        meet_all = l.meet_u(meet_all, x.idx());
        join_all = l.join_u(join_all, x.idx());
    }
    Ok(l.el(l.med_u(a, l.med_u(meet_all, b, join_all), d)))
}

mod sealed {
    use crate::lattice::Lattice;

    pub trait Eval {
        fn lattice_ref(&self) -> &Lattice;
        /// Largest word length the family can evaluate, None if unbounded.
        fn word_cap(&self) -> Option<usize>;
        fn eval_word_u(&self, w: &[u8]) -> u8;
    }
}

use sealed::Eval;

/// A variadic lattice function: one value for every nonempty word over the
/// carrier. Implemented by [`VariadicPolynomial`] (unbounded lengths) and
/// [`VariadicTable`] (explicit components up to a maximum length).
pub trait VariadicFn: sealed::Eval {
    fn lattice(&self) -> &Lattice {
        self.lattice_ref()
    }

    /// Largest evaluable word length, None if unbounded.
    fn max_word_len(&self) -> Option<usize> {
        self.word_cap()
    }

    fn eval_word(&self, w: &[Element]) -> Result<Element, AssocError> {
        if w.is_empty() {
            return Err(AssocError::EmptyWord);
        }
        if let Some(cap) = self.word_cap() {
            if w.len() > cap {
                return Err(AssocError::WordTooLong { len: w.len(), cap });
            }
        }
        let l = self.lattice_ref();
        let mut raw = Vec::with_capacity(w.len());
        for &x in w {
            if !l.owns(x) {
                return Err(AssocError::Poly(PolyError::ForeignElement));
            }
            raw.push(x.idx());
        }
        Ok(l.el(self.eval_word_u(&raw)))
    }
}

/// An associative variadic family of polynomial functions: the unary member
/// is `g1(x) = a1 \/ (d1 /\ x)` and every member of arity n >= 2 is the
/// n-ary normal form with one shared quadruple (a2, b2, c2, d2). Parameters
/// are normalized on construction; the family constraints a1 <= a2 and
/// d2 <= d1 are enforced.
#[derive(Debug, Clone)]
pub struct VariadicPolynomial {
    lattice: Lattice,
    a1: u8,
    d1: u8,
    nary: [u8; 4],
}

impl VariadicPolynomial {
    pub fn new(
        l: &Lattice,
        a1: Element,
        d1: Element,
        a2: Element,
        b2: Element,
        c2: Element,
        d2: Element,
    ) -> Result<Self, AssocError> {
        for e in [a1, d1] {
            if !l.owns(e) {
                return Err(AssocError::Poly(PolyError::ForeignElement));
            }
        }
        let nary = AssocParams::new(a2, b2, c2, d2).normalized(l).to_u(l)?;
        let a1 = a1.idx();
        let d1 = l.join_u(a1, d1.idx());
        if !l.leq_u(a1, nary[0]) {
            return Err(AssocError::IncompatibleFamily(format!(
                "a1 = {} must lie below a2 = {}",
                l.name(l.el(a1)),
                l.name(l.el(nary[0])),
            )));
        }
        if !l.leq_u(nary[3], d1) {
            return Err(AssocError::IncompatibleFamily(format!(
                "d2 = {} must lie below d1 = {}",
                l.name(l.el(nary[3])),
                l.name(l.el(d1)),
            )));
        }
        Ok(VariadicPolynomial {
            lattice: l.clone(),
            a1,
            d1,
            nary,
        })
    }

    pub fn a1(&self) -> Element {
        self.lattice.el(self.a1)
    }

    pub fn d1(&self) -> Element {
        self.lattice.el(self.d1)
    }

    /// The shared parameters of the members of arity >= 2.
    pub fn nary_params(&self) -> AssocParams {
        let l = &self.lattice;
        AssocParams {
            a: l.el(self.nary[0]),
            b: l.el(self.nary[1]),
            c: l.el(self.nary[2]),
            d: l.el(self.nary[3]),
        }
    }

    /// The member of arity n as an explicit polynomial.
    pub fn component(&self, n: usize) -> Result<PolynomialFn, AssocError> {
        if n == 1 {
            let alpha = vec![self.a1, self.d1];
            return Ok(PolynomialFn::from_alpha_u(self.lattice.clone(), 1, alpha).canonical());
        }
        construct_nary(&self.lattice, n, self.nary_params())
    }

    /// Tabulates the members up to `maxlen` as an explicit family.
    pub fn to_table_family(&self, maxlen: usize) -> Result<VariadicTable, AssocError> {
        let mut components = Vec::with_capacity(maxlen);
        for n in 1..=maxlen {
            let table =
                FunctionTable::from_fn_u(self.lattice.clone(), n, |w| self.eval_word_u(w))
                    .map_err(AssocError::Poly)?;
            components.push(table);
        }
        VariadicTable::from_components(components)
    }

    fn g2_u(&self, x: u8, y: u8) -> u8 {
        let l = &self.lattice;
        let [a, b, c, d] = self.nary;
        let mut acc = l.join_u(a, l.meet_u(b, x));
        acc = l.join_u(acc, l.meet_u(c, y));
        l.join_u(acc, l.meet_u(d, l.meet_u(x, y)))
    }

    /// Left-fold evaluation through the binary member: for n >= 2 the word
    /// reduces as g2(...g2(g2(x1, x2), x3)..., xn). Agrees with the direct
    /// formula at every arity; exercised by tests rather than asserted here.
    pub fn eval_fold(&self, w: &[Element]) -> Result<Element, AssocError> {
        if w.is_empty() {
            return Err(AssocError::EmptyWord);
        }
        let l = &self.lattice;
        let mut raw = Vec::with_capacity(w.len());
        for &x in w {
            if !l.owns(x) {
                return Err(AssocError::Poly(PolyError::ForeignElement));
            }
            raw.push(x.idx());
        }
        if raw.len() == 1 {
            return Ok(l.el(self.eval_word_u(&raw)));
        }
        let mut acc = self.g2_u(raw[0], raw[1]);
        for &x in &raw[2..] {
            acc = self.g2_u(acc, x);
        }
        Ok(l.el(acc))
    }

    /// Range idempotency (`g(g(x)^n) = g(x)` for all words and counts) holds
    /// for an associative family exactly when a1 = a2 and d1 = d2: the
    /// members of arity >= 2 send the all-v word to a2 \/ (d2 /\ v), and the
    /// unary member sends v to a1 \/ (d1 /\ v), so the two intervals of
    /// fixed points coincide exactly under that condition.
    pub fn is_range_idempotent(&self) -> bool {
        self.a1 == self.nary[0] && self.d1 == self.nary[3]
    }
}

impl sealed::Eval for VariadicPolynomial {
    fn lattice_ref(&self) -> &Lattice {
        &self.lattice
    }

    fn word_cap(&self) -> Option<usize> {
        None
    }

    fn eval_word_u(&self, w: &[u8]) -> u8 {
        let l = &self.lattice;
        match w.len() {
            0 => unreachable!("empty words are rejected before evaluation"),
            1 => l.join_u(self.a1, l.meet_u(self.d1, w[0])),
            n => {
                let [a, b, c, d] = self.nary;
                let bc = l.meet_u(b, c);
                let mut acc = l.join_u(a, l.meet_u(b, w[0]));
                acc = l.join_u(acc, l.meet_u(c, w[n - 1]));
                let mut all = w[0];
                for &x in &w[1..] {
                    all = l.meet_u(all, x);
                    acc = l.join_u(acc, l.meet_u(bc, x));
                }
                acc = l.join_u(acc, l.meet_u(bc, w[0]));
                l.join_u(acc, l.meet_u(d, all))
            }
        }
    }
}

impl VariadicFn for VariadicPolynomial {}

/// An arbitrary variadic function given extensionally: one value table per
/// arity, for arities 1..=k with no gaps.
#[derive(Debug, Clone)]
pub struct VariadicTable {
    lattice: Lattice,
    components: Vec<FunctionTable>,
}

impl VariadicTable {
    pub fn from_components(components: Vec<FunctionTable>) -> Result<Self, AssocError> {
        let Some(first) = components.first() else {
            return Err(AssocError::EmptyWord);
        };
        let lattice = first.lattice().clone();
        for (i, t) in components.iter().enumerate() {
            if t.arity() != i + 1 {
                return Err(AssocError::BadComponentArity {
                    index: i + 1,
                    arity: t.arity(),
                });
            }
            if !t.lattice().same_presentation(&lattice) {
                return Err(AssocError::MixedLattices);
            }
        }
        Ok(VariadicTable {
            lattice,
            components,
        })
    }

    /// Builds the family generated by folding a binary function from the
    /// left: component 1 is `g1`, component n >= 2 maps (x1..xn) to
    /// g2(...g2(g2(x1, x2), x3)..., xn).
    pub fn from_fold(
        g1: &FunctionTable,
        g2: &FunctionTable,
        maxlen: usize,
    ) -> Result<Self, AssocError> {
        if g1.arity() != 1 {
            return Err(AssocError::BadComponentArity {
                index: 1,
                arity: g1.arity(),
            });
        }
        if g2.arity() != 2 {
            return Err(AssocError::BadComponentArity {
                index: 2,
                arity: g2.arity(),
            });
        }
        if maxlen < 2 {
            return Err(AssocError::MaxlenTooSmall(maxlen));
        }
        if !g1.lattice().same_presentation(g2.lattice()) {
            return Err(AssocError::MixedLattices);
        }
        let l = g1.lattice().clone();
        let mut components = vec![g1.clone(), g2.clone()];
        for n in 3..=maxlen {
            let table = FunctionTable::from_fn_u(l.clone(), n, |w| {
                let mut acc = g2.get_u(&w[..2]);
                for &x in &w[2..] {
                    acc = g2.get_u(&[acc, x]);
                }
                acc
            })
            .map_err(AssocError::Poly)?;
            components.push(table);
        }
        Ok(VariadicTable {
            lattice: l,
            components,
        })
    }

    pub fn component(&self, n: usize) -> Option<&FunctionTable> {
        self.components.get(n.checked_sub(1)?)
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

impl sealed::Eval for VariadicTable {
    fn lattice_ref(&self) -> &Lattice {
        &self.lattice
    }

    fn word_cap(&self) -> Option<usize> {
        Some(self.components.len())
    }

    fn eval_word_u(&self, w: &[u8]) -> u8 {
        self.components[w.len() - 1].get_u(w)
    }
}

impl VariadicFn for VariadicTable {}

/// Extends an associative polynomial function to an associative variadic
/// family whose member of f's arity is f itself. Among the admissible unary
/// parts we fix the tightest one, a1 = a and d1 = d.
pub fn extend_to_variadic(f: &PolynomialFn) -> Result<VariadicPolynomial, AssocError> {
    let p = classify_nary(f)?;
    VariadicPolynomial::new(f.lattice(), p.a, p.d, p.a, p.b, p.c, p.d)
}

fn checked_maxlen<G: VariadicFn>(g: &G, maxlen: usize) -> Result<(), AssocError> {
    if maxlen < 2 {
        return Err(AssocError::MaxlenTooSmall(maxlen));
    }
    if let Some(cap) = g.max_word_len() {
        if maxlen > cap {
            return Err(AssocError::WordTooLong { len: maxlen, cap });
        }
    }
    Ok(())
}

fn word_space(size: usize, maxlen: usize, per_word: impl Fn(usize) -> u128) -> u128 {
    let mut total = 0u128;
    for m in 1..=maxlen {
        total = total.saturating_add((size as u128).saturating_pow(m as u32) * per_word(m));
    }
    total
}

/// Decides variadic associativity with the default budget.
pub fn is_associative_variadic<G: VariadicFn>(
    g: &G,
    maxlen: usize,
) -> Result<Verdict<VariadicWitness>, AssocError> {
    is_associative_variadic_budgeted(g, maxlen, DEFAULT_BUDGET)
}

/// Decides variadic associativity: for every word w with 1 <= |w| <= maxlen
/// and every split w = x . y, evaluating the halves first must agree with
/// the whole word, `g(g(x) g(y)) = g(w)`. An empty side contributes no
/// letters, so those splits degenerate to `g(g(w)) = g(w)`; the all-empty
/// suffix split duplicates the all-empty prefix split and is skipped.
/// Words are scanned by length then lexicographically, splits in ascending
/// prefix length; the least counterexample is reported.
pub fn is_associative_variadic_budgeted<G: VariadicFn>(
    g: &G,
    maxlen: usize,
    budget: u64,
) -> Result<Verdict<VariadicWitness>, AssocError> {
    checked_maxlen(g, maxlen)?;
    let l = g.lattice().clone();
    let needed = word_space(l.size(), maxlen, |m| 3 * m as u128 + 2);
    if needed > budget as u128 {
        return Err(AssocError::BudgetExceeded { needed, budget });
    }
    for m in 1..=maxlen {
        let mut word = vec![0u8; m];
        loop {
            let whole = g.eval_word_u(&word);
            for split in 0..m {
                let lhs = if split == 0 {
                    g.eval_word_u(&[whole])
                } else {
                    let left = g.eval_word_u(&word[..split]);
                    let right = g.eval_word_u(&word[split..]);
                    g.eval_word_u(&[left, right])
                };
                if lhs != whole {
                    return Ok(Verdict::Fails(VariadicWitness {
                        word: word.iter().map(|&x| l.el(x)).collect(),
                        split,
                        lhs: l.el(lhs),
                        rhs: l.el(whole),
                    }));
                }
            }
            if !next_tuple(&mut word, l.size_u()) {
                break;
            }
        }
    }
    Ok(Verdict::Holds)
}

/// The segment formulation of variadic associativity: replacing any
/// nonempty contiguous segment of a word by its value must not change the
/// word's value, `g(x g(y) z) = g(x y z)`. Equivalent to the split
/// formulation; both are exercised independently so the equivalence can be
/// verified rather than assumed.
pub fn satisfies_segment_collapse<G: VariadicFn>(
    g: &G,
    maxlen: usize,
) -> Result<Verdict<SegmentWitness>, AssocError> {
    checked_maxlen(g, maxlen)?;
    let l = g.lattice().clone();
    let needed = word_space(l.size(), maxlen, |m| (m as u128) * (m as u128 + 1) + 1);
    if needed > DEFAULT_BUDGET as u128 {
        return Err(AssocError::BudgetExceeded {
            needed,
            budget: DEFAULT_BUDGET,
        });
    }
    let mut rewritten = Vec::with_capacity(maxlen);
    for m in 1..=maxlen {
        let mut word = vec![0u8; m];
        loop {
            let whole = g.eval_word_u(&word);
            for start in 0..m {
                for end in start + 1..=m {
                    let inner = g.eval_word_u(&word[start..end]);
                    rewritten.clear();
                    rewritten.extend_from_slice(&word[..start]);
                    rewritten.push(inner);
                    rewritten.extend_from_slice(&word[end..]);
                    let lhs = g.eval_word_u(&rewritten);
                    if lhs != whole {
                        return Ok(Verdict::Fails(SegmentWitness {
                            word: word.iter().map(|&x| l.el(x)).collect(),
                            start,
                            end,
                            lhs: l.el(lhs),
                            rhs: l.el(whole),
                        }));
                    }
                }
            }
            if !next_tuple(&mut word, l.size_u()) {
                break;
            }
        }
    }
    Ok(Verdict::Holds)
}

/// Checks `g(x g(xyz) z) = g(xyz)`: reinserting the value of the whole word
/// in place of any nonempty segment is a fixpoint. Holds for every
/// associative range-idempotent family.
pub fn satisfies_value_reinsertion<G: VariadicFn>(
    g: &G,
    maxlen: usize,
) -> Result<Verdict<SegmentWitness>, AssocError> {
    checked_maxlen(g, maxlen)?;
    let l = g.lattice().clone();
    let needed = word_space(l.size(), maxlen, |m| {
        (m as u128) * (m as u128 + 1) / 2 + 1
    });
    if needed > DEFAULT_BUDGET as u128 {
        return Err(AssocError::BudgetExceeded {
            needed,
            budget: DEFAULT_BUDGET,
        });
    }
    let mut rewritten = Vec::with_capacity(maxlen);
    for m in 1..=maxlen {
        let mut word = vec![0u8; m];
        loop {
            let whole = g.eval_word_u(&word);
            for start in 0..m {
                for end in start + 1..=m {
                    rewritten.clear();
                    rewritten.extend_from_slice(&word[..start]);
                    rewritten.push(whole);
                    rewritten.extend_from_slice(&word[end..]);
                    let lhs = g.eval_word_u(&rewritten);
                    if lhs != whole {
                        return Ok(Verdict::Fails(SegmentWitness {
                            word: word.iter().map(|&x| l.el(x)).collect(),
                            start,
                            end,
                            lhs: l.el(lhs),
                            rhs: l.el(whole),
                        }));
                    }
                }
            }
            if !next_tuple(&mut word, l.size_u()) {
                break;
            }
        }
    }
    Ok(Verdict::Holds)
}

/// Checks range idempotency: `g(g(x)^n) = g(x)` for every word with
/// 1 <= |x| <= maxlen and every repetition count 1 <= n <= maxlen.
pub fn is_range_idempotent_variadic<G: VariadicFn>(
    g: &G,
    maxlen: usize,
) -> Result<Verdict<PowerWitness>, AssocError> {
    checked_maxlen(g, maxlen)?;
    let l = g.lattice().clone();
    let needed = word_space(l.size(), maxlen, |_| maxlen as u128 + 1);
    if needed > DEFAULT_BUDGET as u128 {
        return Err(AssocError::BudgetExceeded {
            needed,
            budget: DEFAULT_BUDGET,
        });
    }
    let mut rep = Vec::with_capacity(maxlen);
    for m in 1..=maxlen {
        let mut word = vec![0u8; m];
        loop {
            let v = g.eval_word_u(&word);
            for n in 1..=maxlen {
                rep.clear();
                rep.resize(n, v);
                let lhs = g.eval_word_u(&rep);
                if lhs != v {
                    return Ok(Verdict::Fails(PowerWitness {
                        word: word.iter().map(|&x| l.el(x)).collect(),
                        reps: n,
                        lhs: l.el(lhs),
                        rhs: l.el(v),
                    }));
                }
            }
            if !next_tuple(&mut word, l.size_u()) {
                break;
            }
        }
    }
    Ok(Verdict::Holds)
}

/// Checks power invariance: `g(x^n) = g(x)` where x^n is the word repeated
/// n times, for all |x| * n <= maxlen. For associative families this is
/// equivalent to range idempotency.
pub fn is_power_invariant_variadic<G: VariadicFn>(
    g: &G,
    maxlen: usize,
) -> Result<Verdict<PowerWitness>, AssocError> {
    checked_maxlen(g, maxlen)?;
    let l = g.lattice().clone();
    let needed = word_space(l.size(), maxlen, |m| (maxlen / m) as u128 + 1);
    if needed > DEFAULT_BUDGET as u128 {
        return Err(AssocError::BudgetExceeded {
            needed,
            budget: DEFAULT_BUDGET,
        });
    }
    let mut rep = Vec::with_capacity(maxlen);
    for m in 1..=maxlen {
        let mut word = vec![0u8; m];
        loop {
            let v = g.eval_word_u(&word);
            for n in 2..=maxlen / m {
                rep.clear();
                for _ in 0..n {
                    rep.extend_from_slice(&word);
                }
                let lhs = g.eval_word_u(&rep);
                if lhs != v {
                    return Ok(Verdict::Fails(PowerWitness {
                        word: word.iter().map(|&x| l.el(x)).collect(),
                        reps: n,
                        lhs: l.el(lhs),
                        rhs: l.el(v),
                    }));
                }
            }
            if !next_tuple(&mut word, l.size_u()) {
                break;
            }
        }
    }
    Ok(Verdict::Holds)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(k: usize) -> Lattice {
        Lattice::chain(k).unwrap()
    }

    fn params(l: &Lattice, names: [&str; 4]) -> AssocParams {
        let e = |n| l.element_named(n).unwrap();
        AssocParams::new(e(names[0]), e(names[1]), e(names[2]), e(names[3]))
    }

    fn family(l: &Lattice, names: [&str; 6]) -> VariadicPolynomial {
        let e = |n| l.element_named(n).unwrap();
        VariadicPolynomial::new(
            l,
            e(names[0]),
            e(names[1]),
            e(names[2]),
            e(names[3]),
            e(names[4]),
            e(names[5]),
        )
        .unwrap()
    }

    fn meet_table(l: &Lattice, n: usize) -> FunctionTable {
        FunctionTable::from_fn_u(l.clone(), n, |w| {
            w.iter().copied().reduce(|x, y| l.meet_u(x, y)).unwrap()
        })
        .unwrap()
    }

    #[test]
    fn construct_meet_and_projection() {
        let l = chain(3);
        let meet = construct_nary(&l, 3, params(&l, ["0", "0", "0", "1"])).unwrap();
        assert_eq!(meet.table().values_u(), meet_table(&l, 3).values_u());

        let proj = construct_nary(&l, 2, params(&l, ["0", "1", "0", "1"])).unwrap();
        let expected = FunctionTable::from_fn_u(l.clone(), 2, |w| w[0]).unwrap();
        assert_eq!(proj.table().values_u(), expected.values_u());
    }

    #[test]
    fn construct_mixed_parameters() {
        let l = chain(3);
        let f = construct_nary(&l, 3, params(&l, ["0", "c1", "0", "1"])).unwrap();
        let (c1, top, bot) = (
            l.element_named("c1").unwrap(),
            l.top(),
            l.bottom(),
        );
        // f(x) = (c1 /\ x1) \/ (x1 /\ x2 /\ x3)
        assert_eq!(f.eval(&[top, top, bot]).unwrap(), c1);
        assert_eq!(f.eval(&[top, top, top]).unwrap(), top);
        assert_eq!(f.eval(&[bot, top, top]).unwrap(), bot);
    }

    #[test]
    fn normalization_is_idempotent_and_function_preserving() {
        let l = chain(3);
        let size = l.size();
        for a in 0..size {
            for b in 0..size {
                for c in 0..size {
                    for d in 0..size {
                        let p = AssocParams::new(
                            l.element(a),
                            l.element(b),
                            l.element(c),
                            l.element(d),
                        );
                        let norm = p.normalized(&l);
                        assert_eq!(norm, norm.normalized(&l));
                        let raw = construct_from(&l, 2, p).unwrap();
                        let cooked = construct_from(&l, 2, norm).unwrap();
                        assert_eq!(raw.alpha_u(), cooked.alpha_u());
                    }
                }
            }
        }
    }

    #[test]
    fn normalized_quadruples_are_exactly_the_constrained_ones() {
        let l = Lattice::boolean(2).unwrap();
        for a in l.elements() {
            for b in l.elements() {
                for c in l.elements() {
                    for d in l.elements() {
                        let p = AssocParams::new(a, b, c, d);
                        let constrained = l.leq(a, l.meet(b, c)) && l.leq(l.join(b, c), d);
                        assert_eq!(p.is_normalized(&l), constrained);
                    }
                }
            }
        }
    }

    #[test]
    fn meet_is_associative_everywhere() {
        for l in [chain(3), Lattice::boolean(2).unwrap()] {
            let t = meet_table(&l, 3);
            assert!(is_associative_nary(&t).unwrap().holds());
            let t2 = meet_table(&l, 2);
            assert!(is_associative_nary(&t2).unwrap().holds());
        }
    }

    #[test]
    fn projection_is_associative() {
        let l = chain(3);
        let t = FunctionTable::from_fn_u(l.clone(), 3, |w| w[0]).unwrap();
        assert!(is_associative_nary(&t).unwrap().holds());
    }

    #[test]
    fn binary_scan_examples() {
        // Associativity does not require being a polynomial: xor is a group
        // operation, hence associative.
        let c2 = chain(2);
        let xor = FunctionTable::from_fn_u(c2.clone(), 2, |w| w[0] ^ w[1]).unwrap();
        assert!(is_associative_nary(&xor).unwrap().holds());

        // A shifted meet is a binary polynomial, and the scan confirms that
        // every binary polynomial function is associative.
        let c3 = chain(3);
        let shifted =
            FunctionTable::from_fn_u(c3.clone(), 2, |w| c3.meet_u(w[0], c3.join_u(w[1], 1)))
                .unwrap();
        assert!(is_associative_nary(&shifted).unwrap().holds());

        // Negation in the first slot is not associative; the least failing
        // word is all-bottom, where the two collapse positions disagree.
        let neg = FunctionTable::from_fn_u(c2.clone(), 2, |w| 1 - w[0]).unwrap();
        let verdict = is_associative_nary(&neg).unwrap();
        let w = verdict.witness().expect("negation is not associative");
        assert_eq!(w.word, vec![c2.bottom(); 3]);
        assert_eq!((w.pos_a, w.pos_b), (0, 1));
        assert_eq!(w.value_a, c2.bottom());
        assert_eq!(w.value_b, c2.top());
        // Recompute the two collapses to confirm the witness is genuine.
        let raw: Vec<u8> = w.word.iter().map(|e| e.index() as u8).collect();
        let collapse = |pos: usize| {
            let inner = neg.get_u(&raw[pos..pos + 2]);
            let mut buf = raw[..pos].to_vec();
            buf.push(inner);
            buf.extend_from_slice(&raw[pos + 2..]);
            neg.get_u(&buf)
        };
        assert_ne!(collapse(w.pos_a), collapse(w.pos_b));
    }

    #[test]
    fn unary_associativity_is_composition_idempotence() {
        let l = chain(3);
        let id = FunctionTable::from_fn_u(l.clone(), 1, |w| w[0]).unwrap();
        assert!(is_associative_nary(&id).unwrap().holds());

        // 0 -> c1 -> 1 -> 1 is monotone but not stable under composition.
        let bump = FunctionTable::from_fn_u(l.clone(), 1, |w| (w[0] + 1).min(2)).unwrap();
        let verdict = is_associative_nary(&bump).unwrap();
        let w = verdict.witness().unwrap();
        assert_eq!(w.word, vec![l.bottom()]);
        assert_eq!(w.value_a, l.top());
        assert_eq!(w.value_b, l.element_named("c1").unwrap());
    }

    #[test]
    fn budget_guard_refuses_oversized_scans() {
        let l = chain(2);
        let t = meet_table(&l, 2);
        match is_associative_nary_budgeted(&t, 3) {
            Err(AssocError::BudgetExceeded { needed, budget: 3 }) => {
                assert_eq!(needed, 2u128 * 8 * 2);
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn classify_reads_corner_values() {
        let l = chain(3);
        let join = FunctionTable::from_fn_u(l.clone(), 2, |w| l.join_u(w[0], w[1]))
            .unwrap()
            .to_polynomial()
            .unwrap();
        let p = classify_nary(&join).unwrap();
        assert_eq!(p, params(&l, ["0", "1", "1", "1"]));

        let meet = meet_table(&l, 3).to_polynomial().unwrap();
        assert_eq!(classify_nary(&meet).unwrap(), params(&l, ["0", "0", "0", "1"]));

        let constant = PolynomialFn::new(
            &l,
            2,
            &[
                l.element_named("c1").unwrap(),
                l.bottom(),
                l.bottom(),
                l.bottom(),
            ],
        )
        .unwrap();
        assert_eq!(
            classify_nary(&constant).unwrap(),
            params(&l, ["c1", "c1", "c1", "c1"])
        );
    }

    #[test]
    fn classify_rejects_median() {
        let l = chain(2);
        let med = FunctionTable::from_fn_u(l.clone(), 3, |w| l.med_u(w[0], w[1], w[2]))
            .unwrap()
            .to_polynomial()
            .unwrap();
        match classify_nary(&med) {
            Err(AssocError::NotAssociative(w)) => {
                assert_eq!(w.word.len(), 5);
            }
            other => panic!("expected a non-associativity witness, got {other:?}"),
        }
    }

    #[test]
    fn classify_after_construct_returns_normalized_params() {
        let l = chain(3);
        for quads in [
            ["0", "0", "0", "1"],
            ["0", "1", "0", "1"],
            ["0", "0", "1", "1"],
            ["c1", "c1", "1", "1"],
            ["0", "c1", "c1", "1"],
            // Not normalized: classify must return the normalized reading.
            ["c1", "0", "0", "0"],
            ["0", "c1", "0", "0"],
        ] {
            let p = params(&l, quads);
            let f = construct_nary(&l, 2, p).unwrap();
            assert_eq!(classify_nary(&f).unwrap(), p.normalized(&l));
        }
    }

    #[test]
    fn enumerate_small_binary_case_matches_brute_force() {
        let l = chain(2);
        let enumerated = enumerate_associative_nary(&l, 2, DEFAULT_BUDGET).unwrap();
        assert_eq!(enumerated.len(), 6);

        // Oracle: scan all 16 binary tables, keep the associative polynomial
        // ones, compare canonical coefficient sets.
        let mut oracle = Vec::new();
        for bits in 0..16u32 {
            let t = FunctionTable::from_fn_u(l.clone(), 2, |w| {
                ((bits >> (w[0] * 2 + w[1])) & 1) as u8
            })
            .unwrap();
            if let Ok(f) = t.to_polynomial() {
                if is_associative_nary(&t).unwrap().holds() {
                    oracle.push(f.canonical().alpha_u().to_vec());
                }
            }
        }
        oracle.sort();
        let enumerated_alphas: Vec<Vec<u8>> = enumerated
            .iter()
            .map(|(_, f)| f.canonical().alpha_u().to_vec())
            .collect();
        assert_eq!(enumerated_alphas, oracle);
    }

    #[test]
    fn enumerate_contains_the_four_term_functions() {
        let l = chain(3);
        let enumerated = enumerate_associative_nary(&l, 2, DEFAULT_BUDGET).unwrap();
        let alphas: Vec<&[u8]> = enumerated.iter().map(|(_, f)| f.alpha_u()).collect();
        let expect = |p: AssocParams| {
            construct_nary(&l, 2, p).unwrap().alpha_u().to_vec()
        };
        for quad in [
            ["0", "1", "0", "1"], // first projection
            ["0", "0", "1", "1"], // last projection
            ["0", "0", "0", "1"], // meet
            ["0", "1", "1", "1"], // join
        ] {
            let target = expect(params(&l, quad));
            assert!(alphas.contains(&target.as_slice()), "missing {quad:?}");
        }
    }

    #[test]
    fn enumerate_respects_budget() {
        let l = chain(2);
        match enumerate_associative_nary(&l, 2, 10) {
            Err(AssocError::BudgetExceeded { .. }) => {}
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn variadic_eval_meet_projection_constant() {
        let c3 = chain(3);
        let meet = family(&c3, ["0", "1", "0", "0", "0", "1"]);
        let e = |n: &str| c3.element_named(n).unwrap();
        assert_eq!(
            meet.eval_word(&[e("1"), e("c1"), e("1")]).unwrap(),
            e("c1")
        );
        assert_eq!(meet.eval_word(&[e("c1")]).unwrap(), e("c1"));

        let first = family(&c3, ["0", "1", "0", "1", "0", "1"]);
        assert_eq!(
            first.eval_word(&[e("c1"), e("0"), e("1"), e("1")]).unwrap(),
            e("c1")
        );

        let constant = family(&c3, ["c1", "c1", "c1", "c1", "c1", "c1"]);
        for word in [vec![e("0")], vec![e("1"), e("0")], vec![e("0"); 5]] {
            assert_eq!(constant.eval_word(&word).unwrap(), e("c1"));
        }

        assert_eq!(meet.eval_word(&[]).unwrap_err(), AssocError::EmptyWord);
    }

    #[test]
    fn variadic_constructor_enforces_constraints() {
        let l = chain(3);
        let e = |n: &str| l.element_named(n).unwrap();
        // a1 above a2.
        match VariadicPolynomial::new(&l, e("1"), e("1"), e("0"), e("0"), e("0"), e("1")) {
            Err(AssocError::IncompatibleFamily(msg)) => assert!(msg.contains("a1")),
            other => panic!("expected constraint error, got {other:?}"),
        }
        // d2 not below d1.
        match VariadicPolynomial::new(&l, e("0"), e("0"), e("0"), e("0"), e("0"), e("1")) {
            Err(AssocError::IncompatibleFamily(msg)) => assert!(msg.contains("d2")),
            other => panic!("expected constraint error, got {other:?}"),
        }
    }

    #[test]
    fn variadic_components_match_direct_construction() {
        let c3 = chain(3);
        let g = family(&c3, ["0", "1", "0", "c1", "0", "1"]);
        let c1 = g.component(1).unwrap();
        assert_eq!(c1.alpha_u(), &[0, 2]);
        for n in 2..=4 {
            let direct = construct_nary(&c3, n, g.nary_params()).unwrap();
            assert_eq!(g.component(n).unwrap().alpha_u(), direct.alpha_u());
            // The component tables agree with word evaluation.
            let tabulated = g.to_table_family(4).unwrap();
            assert_eq!(
                tabulated.component(n).unwrap().values_u(),
                direct.table().values_u()
            );
        }
    }

    #[test]
    fn fold_evaluation_agrees_with_direct_formula() {
        let c3 = chain(3);
        for names in [
            ["0", "1", "0", "0", "0", "1"],
            ["0", "1", "0", "1", "0", "1"],
            ["0", "1", "0", "0", "1", "1"],
            ["0", "1", "c1", "c1", "c1", "1"],
            ["c1", "1", "c1", "1", "c1", "1"],
        ] {
            let g = family(&c3, names);
            for len in 1..=5 {
                let mut word = vec![0u8; len];
                loop {
                    let els: Vec<Element> = word.iter().map(|&x| c3.el(x)).collect();
                    assert_eq!(
                        g.eval_word(&els).unwrap(),
                        g.eval_fold(&els).unwrap(),
                        "family {names:?}, word {word:?}"
                    );
                    if !next_tuple(&mut word, 3) {
                        break;
                    }
                }
            }
        }
    }

    #[test]
    fn valid_families_are_associative() {
        let c3 = chain(3);
        for names in [
            ["0", "1", "0", "0", "0", "1"],
            ["0", "1", "0", "1", "0", "1"],
            ["0", "1", "c1", "c1", "c1", "1"],
            ["0", "1", "c1", "1", "c1", "1"],
            ["c1", "c1", "c1", "c1", "c1", "c1"],
        ] {
            let g = family(&c3, names);
            assert!(
                is_associative_variadic(&g, 4).unwrap().holds(),
                "family {names:?}"
            );
            assert!(satisfies_segment_collapse(&g, 4).unwrap().holds());
        }
    }

    #[test]
    fn xor_fold_family_is_associative() {
        // Folding xor is the two-element group operation extended to words;
        // it satisfies the split identity at every length even though no
        // member is a polynomial function.
        let l = chain(2);
        let id = FunctionTable::from_fn_u(l.clone(), 1, |w| w[0]).unwrap();
        let xor = FunctionTable::from_fn_u(l.clone(), 2, |w| w[0] ^ w[1]).unwrap();
        let g = VariadicTable::from_fold(&id, &xor, 5).unwrap();
        assert!(is_associative_variadic(&g, 5).unwrap().holds());
        assert!(satisfies_segment_collapse(&g, 5).unwrap().holds());
    }

    #[test]
    fn mismatched_unary_component_breaks_associativity() {
        // Same xor fold, but with a constant-bottom unary member: collapsing
        // the whole word through g1 loses the value.
        let l = chain(2);
        let zero = FunctionTable::from_fn_u(l.clone(), 1, |_| 0).unwrap();
        let xor = FunctionTable::from_fn_u(l.clone(), 2, |w| w[0] ^ w[1]).unwrap();
        let g = VariadicTable::from_fold(&zero, &xor, 4).unwrap();
        let verdict = is_associative_variadic(&g, 4).unwrap();
        let w = verdict.witness().unwrap();
        assert_eq!(w.word, vec![l.bottom(), l.top()]);
        assert_eq!(w.split, 0);
        assert_eq!(w.lhs, l.bottom());
        assert_eq!(w.rhs, l.top());
    }

    #[test]
    fn split_and_segment_formulations_agree() {
        let c3 = chain(3);
        let cases: Vec<VariadicTable> = vec![
            {
                let id = FunctionTable::from_fn_u(c3.clone(), 1, |w| w[0]).unwrap();
                let shifted = FunctionTable::from_fn_u(c3.clone(), 2, |w| {
                    c3.meet_u(w[0], c3.join_u(w[1], 1))
                })
                .unwrap();
                VariadicTable::from_fold(&id, &shifted, 4).unwrap()
            },
            {
                let id = FunctionTable::from_fn_u(c3.clone(), 1, |w| w[0]).unwrap();
                let join = FunctionTable::from_fn_u(c3.clone(), 2, |w| c3.join_u(w[0], w[1]))
                    .unwrap();
                VariadicTable::from_fold(&id, &join, 4).unwrap()
            },
            family(&c3, ["0", "1", "0", "c1", "0", "1"])
                .to_table_family(4)
                .unwrap(),
        ];
        for (i, g) in cases.iter().enumerate() {
            let split = is_associative_variadic(g, 4).unwrap().holds();
            let segment = satisfies_segment_collapse(g, 4).unwrap().holds();
            assert_eq!(split, segment, "case {i}");
        }
    }

    #[test]
    fn range_idempotency_closed_form_matches_checker() {
        let c3 = chain(3);
        for names in [
            ["0", "1", "0", "0", "0", "1"],  // a1=a2, d1=d2: idempotent-ish
            ["0", "1", "c1", "c1", "c1", "1"], // a2 above a1
            ["0", "1", "0", "0", "0", "c1"], // d2 below d1
            ["c1", "c1", "c1", "c1", "c1", "c1"], // constant
        ] {
            let g = family(&c3, names);
            let checked = is_range_idempotent_variadic(&g, 4).unwrap().holds();
            assert_eq!(g.is_range_idempotent(), checked, "family {names:?}");
        }
    }

    #[test]
    fn range_idempotency_witness_is_least() {
        let c3 = chain(3);
        // g1 = identity, gn(0..0) = c1: the single-letter word 0 repeated
        // twice already fails.
        let g = family(&c3, ["0", "1", "c1", "c1", "c1", "1"]);
        let verdict = is_range_idempotent_variadic(&g, 4).unwrap();
        let w = verdict.witness().unwrap();
        assert_eq!(w.word, vec![c3.bottom()]);
        assert_eq!(w.reps, 2);
        assert_eq!(w.lhs, c3.element_named("c1").unwrap());
        assert_eq!(w.rhs, c3.bottom());
    }

    #[test]
    fn power_invariance_tracks_range_idempotency_for_associative_families() {
        let c3 = chain(3);
        for names in [
            ["0", "1", "0", "0", "0", "1"],
            ["0", "1", "0", "1", "0", "1"],
            ["0", "1", "c1", "c1", "c1", "1"],
            ["0", "1", "0", "0", "0", "c1"],
            ["c1", "c1", "c1", "c1", "c1", "c1"],
        ] {
            let g = family(&c3, names);
            let ri = is_range_idempotent_variadic(&g, 5).unwrap().holds();
            let pi = is_power_invariant_variadic(&g, 5).unwrap().holds();
            assert_eq!(ri, pi, "family {names:?}");
        }
    }

    #[test]
    fn value_reinsertion_holds_for_associative_range_idempotent_families() {
        let c3 = chain(3);
        for names in [
            ["0", "1", "0", "0", "0", "1"],
            ["0", "1", "0", "1", "0", "1"],
            ["0", "1", "0", "c1", "0", "1"],
            ["c1", "c1", "c1", "c1", "c1", "c1"],
        ] {
            let g = family(&c3, names);
            assert!(g.is_range_idempotent(), "family {names:?}");
            assert!(
                satisfies_value_reinsertion(&g, 4).unwrap().holds(),
                "family {names:?}"
            );
        }
    }

    #[test]
    fn extension_reproduces_the_original_component() {
        let c3 = chain(3);
        let meet = meet_table(&c3, 3).to_polynomial().unwrap();
        let g = extend_to_variadic(&meet).unwrap();
        assert_eq!(
            g.component(3).unwrap().canonical().alpha_u(),
            meet.canonical().alpha_u()
        );
        assert_eq!(
            g.component(2).unwrap().table().values_u(),
            meet_table(&c3, 2).values_u()
        );

        let proj = construct_nary(&c3, 2, params(&c3, ["0", "1", "0", "1"])).unwrap();
        let g = extend_to_variadic(&proj).unwrap();
        let first3 = FunctionTable::from_fn_u(c3.clone(), 3, |w| w[0]).unwrap();
        assert_eq!(g.component(3).unwrap().table().values_u(), first3.values_u());

        let c2 = chain(2);
        let med = FunctionTable::from_fn_u(c2.clone(), 3, |w| c2.med_u(w[0], w[1], w[2]))
            .unwrap()
            .to_polynomial()
            .unwrap();
        assert!(matches!(
            extend_to_variadic(&med),
            Err(AssocError::NotAssociative(_))
        ));
    }

    #[test]
    fn symmetric_form_agrees_with_the_normal_form() {
        let c3 = chain(3);
        let size = c3.size();
        for n in 1..=3usize {
            for a in 0..size {
                for b in 0..size {
                    for c in 0..size {
                        for d in 0..size {
                            let p = AssocParams::new(
                                c3.element(a),
                                c3.element(b),
                                c3.element(c),
                                c3.element(d),
                            );
                            let f = construct_nary(&c3, n, p).unwrap();
                            let mut word = vec![0u8; n];
                            loop {
                                let els: Vec<Element> =
                                    word.iter().map(|&x| c3.el(x)).collect();
                                let via_med = symmetric_median_form(&c3, p, &els).unwrap();
                                assert_eq!(
                                    via_med,
                                    f.eval(&els).unwrap(),
                                    "params ({a},{b},{c},{d}), n={n}, word {word:?}"
                                );
                                if b == c {
                                    let reduced =
                                        symmetric_median_form_reduced(&c3, p, &els).unwrap();
                                    assert_eq!(reduced, via_med);
                                }
                                if !next_tuple(&mut word, size as u8) {
                                    break;
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn table_family_construction_errors() {
        let c2 = chain(2);
        let c3 = chain(3);
        let t1 = FunctionTable::from_fn_u(c2.clone(), 1, |w| w[0]).unwrap();
        let t2 = FunctionTable::from_fn_u(c2.clone(), 2, |w| c2.meet_u(w[0], w[1])).unwrap();
        let t2_other = FunctionTable::from_fn_u(c3.clone(), 2, |w| w[0]).unwrap();

        assert!(matches!(
            VariadicTable::from_components(vec![t2.clone()]),
            Err(AssocError::BadComponentArity { index: 1, arity: 2 })
        ));
        assert!(matches!(
            VariadicTable::from_components(vec![t1.clone(), t2_other.clone()]),
            Err(AssocError::MixedLattices)
        ));
        assert!(matches!(
            VariadicTable::from_fold(&t1, &t2_other, 3),
            Err(AssocError::MixedLattices)
        ));

        let fam = VariadicTable::from_components(vec![t1, t2]).unwrap();
        assert!(matches!(
            is_associative_variadic(&fam, 5),
            Err(AssocError::WordTooLong { len: 5, cap: 2 })
        ));
        assert!(matches!(
            is_associative_variadic(&fam, 1),
            Err(AssocError::MaxlenTooSmall(1))
        ));
    }
}
