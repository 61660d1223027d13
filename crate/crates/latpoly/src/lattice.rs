//! Finite bounded distributive lattices.
//!
//! A [`Lattice`] is built once, validated eagerly, and immutable afterwards.
//! Construction computes the full order relation, the meet and join tables,
//! and the bottom and top elements, and rejects anything that is not a bounded
//! distributive lattice. Downstream code can therefore iterate the tables
//! without re-checking algebraic laws.
//!
//! Elements are dense integer indices paired with a display name. An
//! [`Element`] remembers which lattice it came from, so accidentally mixing
//! elements of two different lattices is caught at run time.

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU32, Ordering};
use std::sync::Arc;

use thiserror::Error;

/// Hard cap on lattice size. Keeps the |L|^(2n-1) enumeration spaces used by
/// the associativity checkers tractable, and lets order ideals live in a u64.
pub const MAX_SIZE: usize = 64;

static NEXT_LATTICE_ID: AtomicU32 = AtomicU32::new(0);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("a lattice needs at least one element")]
    Empty,
    #[error("{0} elements exceeds the supported maximum of {MAX_SIZE}")]
    TooLarge(usize),
    #[error("duplicate element name {0:?}")]
    DuplicateName(String),
    #[error("cover ({0}, {1}) is out of range for {2} elements")]
    CoverOutOfRange(usize, usize, usize),
    #[error("the cover relation contains a cycle")]
    CyclicCovers,
    #[error("not a lattice: elements {x:?} and {y:?} have no {missing}")]
    NotALattice {
        x: String,
        y: String,
        missing: Bound,
    },
    #[error(
        "not distributive: x={x:?}, y={y:?}, z={z:?} violate x /\\ (y \\/ z) = (x /\\ y) \\/ (x /\\ z)"
    )]
    NotDistributive { x: String, y: String, z: String },
    #[error("a chain needs at least 2 elements, got {0}")]
    ChainTooShort(usize),
    #[error("boolean lattice exponent must be between 1 and 4, got {0}")]
    BooleanOutOfRange(usize),
    #[error("no element named {0:?}")]
    UnknownElement(String),
}

/// Which bound was missing when a poset failed to be a lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    Meet,
    Join,
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Meet => write!(f, "greatest lower bound"),
            Bound::Join => write!(f, "least upper bound"),
        }
    }
}

/// An element of a specific [`Lattice`]: a dense index plus the identity of
/// its owning lattice.
///
/// `Element` deliberately implements neither `Ord` nor `Display`: the index
/// order is not the lattice order, and the display name lives in the lattice.
/// Use [`Lattice::leq`] to compare and [`Lattice::name`] to print.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Element {
    lattice_id: u32,
    index: u8,
}

impl Element {
    /// Dense index of this element, in `[0, lattice.size())`.
    pub fn index(self) -> usize {
        self.index as usize
    }

    pub(crate) fn idx(self) -> u8 {
        self.index
    }
}

struct Inner {
    id: u32,
    label: String,
    names: Vec<String>,
    by_name: HashMap<String, u8>,
    /// `up[x]` is the bitmask of all y with x <= y (the principal filter).
    up: Vec<u64>,
    /// `down[x]` is the bitmask of all y with y <= x (the principal ideal).
    down: Vec<u64>,
    /// Row-major size*size tables of element indices.
    meet: Vec<u8>,
    join: Vec<u8>,
    /// The Hasse diagram, recomputed from the order and sorted.
    covers: Vec<(u8, u8)>,
    bottom: u8,
    top: u8,
}

/// A finite bounded distributive lattice.
///
/// Cheap to clone (the tables are shared). All constructors validate: the
/// cover relation must be acyclic, every pair of elements must have a
/// greatest lower and least upper bound, and both distributive laws must
/// hold. No unvalidated `Lattice` can exist.
#[derive(Clone)]
pub struct Lattice {
    inner: Arc<Inner>,
}

impl fmt::Debug for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Lattice")
            .field("label", &self.inner.label)
            .field("size", &self.inner.names.len())
            .finish()
    }
}

impl Lattice {
    /// Builds a lattice from element names and a cover relation given as
    /// `(lower, upper)` index pairs. The order is the reflexive-transitive
    /// closure of the covers.
    pub fn from_covers<S: AsRef<str>>(
        names: &[S],
        covers: &[(usize, usize)],
    ) -> Result<Lattice, LatticeError> {
        let n = names.len();
        Self::build(names, covers, format!("custom({n})"))
    }

    fn build<S: AsRef<str>>(
        names: &[S],
        covers: &[(usize, usize)],
        label: String,
    ) -> Result<Lattice, LatticeError> {
        let n = names.len();
        if n == 0 {
            return Err(LatticeError::Empty);
        }
        if n > MAX_SIZE {
            return Err(LatticeError::TooLarge(n));
        }

        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_owned()).collect();
        let mut by_name = HashMap::with_capacity(n);
        for (i, name) in names.iter().enumerate() {
            if by_name.insert(name.clone(), i as u8).is_some() {
                return Err(LatticeError::DuplicateName(name.clone()));
            }
        }

        let mut children: Vec<Vec<u8>> = vec![Vec::new(); n];
        for &(lo, hi) in covers {
            if lo >= n || hi >= n {
                return Err(LatticeError::CoverOutOfRange(lo, hi, n));
            }
            if lo == hi {
                return Err(LatticeError::CyclicCovers);
            }
            children[lo].push(hi as u8);
        }

        let order = topological_order(&children).ok_or(LatticeError::CyclicCovers)?;

        // Reachability along covers, processed against topological order so
        // each node sees its successors' filters already complete.
        let mut up = vec![0u64; n];
        for &x in order.iter().rev() {
            let mut mask = 1u64 << x;
            for &c in &children[x as usize] {
                mask |= up[c as usize];
            }
            up[x as usize] = mask;
        }
        let mut down = vec![0u64; n];
        for x in 0..n {
            for y in 0..n {
                if up[x] >> y & 1 == 1 {
                    down[y] |= 1 << x;
                }
            }
        }

        let mut meet = vec![0u8; n * n];
        let mut join = vec![0u8; n * n];
        for x in 0..n {
            for y in 0..=x {
                let glb = extremum(down[x] & down[y], &down)
                    .ok_or_else(|| LatticeError::NotALattice {
                        x: names[x].clone(),
                        y: names[y].clone(),
                        missing: Bound::Meet,
                    })?;
                let lub =
                    extremum(up[x] & up[y], &up).ok_or_else(|| LatticeError::NotALattice {
                        x: names[x].clone(),
                        y: names[y].clone(),
                        missing: Bound::Join,
                    })?;
                meet[x * n + y] = glb;
                meet[y * n + x] = glb;
                join[x * n + y] = lub;
                join[y * n + x] = lub;
            }
        }

        // One distributive law implies the other in any lattice, so scanning
        // a single law is a complete check.
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let lhs = meet[x * n + join[y * n + z] as usize];
                    let rhs = join[meet[x * n + y] as usize * n + meet[x * n + z] as usize];
                    if lhs != rhs {
                        return Err(LatticeError::NotDistributive {
                            x: names[x].clone(),
                            y: names[y].clone(),
                            z: names[z].clone(),
                        });
                    }
                }
            }
        }

        let bottom = (1..n as u8).fold(0u8, |acc, x| meet[acc as usize * n + x as usize]);
        let top = (1..n as u8).fold(0u8, |acc, x| join[acc as usize * n + x as usize]);

        // Recompute the Hasse diagram from the closed order; this also
        // normalizes away any redundant input edges.
        let mut hasse = Vec::new();
        for x in 0..n {
            for y in 0..n {
                if x != y && up[x] >> y & 1 == 1 {
                    let strictly_between = up[x] & down[y] & !(1 << x) & !(1 << y);
                    if strictly_between == 0 {
                        hasse.push((x as u8, y as u8));
                    }
                }
            }
        }
        hasse.sort_unstable();

        let id = NEXT_LATTICE_ID.fetch_add(1, Ordering::Relaxed);
        Ok(Lattice {
            inner: Arc::new(Inner {
                id,
                label,
                names,
                by_name,
                up,
                down,
                meet,
                join,
                covers: hasse,
                bottom,
                top,
            }),
        })
    }

    /// The chain 0 < c1 < ... < 1 with `k` elements. Meet is min, join is max.
    pub fn chain(k: usize) -> Result<Lattice, LatticeError> {
        if k < 2 {
            return Err(LatticeError::ChainTooShort(k));
        }
        let names: Vec<String> = (0..k)
            .map(|i| {
                if i == 0 {
                    "0".to_owned()
                } else if i == k - 1 {
                    "1".to_owned()
                } else {
                    format!("c{i}")
                }
            })
            .collect();
        let covers: Vec<(usize, usize)> = (0..k - 1).map(|i| (i, i + 1)).collect();
        Self::build(&names, &covers, format!("chain({k})"))
    }

    /// The powerset lattice of {1, ..., k}, ordered by inclusion. Element
    /// index i is the subset with characteristic bitmask i, so meet and join
    /// are bitwise and/or.
    pub fn boolean(k: usize) -> Result<Lattice, LatticeError> {
        if !(1..=4).contains(&k) {
            return Err(LatticeError::BooleanOutOfRange(k));
        }
        let names: Vec<String> = (0u32..1 << k)
            .map(|m| {
                let members: Vec<String> =
                    (0..k).filter(|i| m >> i & 1 == 1).map(|i| (i + 1).to_string()).collect();
                format!("{{{}}}", members.join(","))
            })
            .collect();
        let mut covers = Vec::new();
        for m in 0..1usize << k {
            for i in 0..k {
                if m >> i & 1 == 0 {
                    covers.push((m, m | 1 << i));
                }
            }
        }
        Self::build(&names, &covers, format!("boolean({k})"))
    }

    /// Direct product with componentwise order. Element names are
    /// `(p_name,q_name)` and the index of `(i, j)` is `i * |q| + j`.
    pub fn product(p: &Lattice, q: &Lattice) -> Result<Lattice, LatticeError> {
        let (np, nq) = (p.size(), q.size());
        if np.saturating_mul(nq) > MAX_SIZE {
            return Err(LatticeError::TooLarge(np * nq));
        }
        let mut names = Vec::with_capacity(np * nq);
        for i in 0..np {
            for j in 0..nq {
                names.push(format!("({},{})", p.inner.names[i], q.inner.names[j]));
            }
        }
        let mut covers = Vec::new();
        for &(a, b) in &p.inner.covers {
            for j in 0..nq {
                covers.push((a as usize * nq + j, b as usize * nq + j));
            }
        }
        for &(a, b) in &q.inner.covers {
            for i in 0..np {
                covers.push((i * nq + a as usize, i * nq + b as usize));
            }
        }
        Self::build(
            &names,
            &covers,
            format!("product({},{})", p.label(), q.label()),
        )
    }

    /// Parses one of the shorthand descriptions `chain:<k>`, `boolean:<k>`,
    /// or `product:<spec>,<spec>`. A factor that is itself a product must be
    /// parenthesized: `product:(product:chain:2,chain:2),chain:2`.
    pub fn from_shorthand(spec: &str) -> Option<Result<Lattice, LatticeError>> {
        let mut spec = spec.trim();
        while let Some(inner) = strip_balanced_parens(spec) {
            spec = inner.trim();
        }
        if let Some(k) = spec.strip_prefix("chain:") {
            return Some(k.trim().parse().map_err(|_| LatticeError::ChainTooShort(0)).and_then(Self::chain));
        }
        if let Some(k) = spec.strip_prefix("boolean:") {
            return Some(
                k.trim()
                    .parse()
                    .map_err(|_| LatticeError::BooleanOutOfRange(0))
                    .and_then(Self::boolean),
            );
        }
        if let Some(rest) = spec.strip_prefix("product:") {
            // Split at the top-level comma: nested products keep their own.
            let mut depth = 0usize;
            for (i, ch) in rest.char_indices() {
                match ch {
                    '(' => depth += 1,
                    ')' => depth = depth.saturating_sub(1),
                    ',' if depth == 0 => {
                        let left = Self::from_shorthand(&rest[..i])?;
                        let right = Self::from_shorthand(&rest[i + 1..])?;
                        return Some(left.and_then(|p| right.and_then(|q| Self::product(&p, &q))));
                    }
                    _ => {}
                }
            }
            return None;
        }
        None
    }

    pub fn size(&self) -> usize {
        self.inner.names.len()
    }

    /// Short description set by the constructor, e.g. `chain(3)` or
    /// `product(chain(3),chain(2))`. Lattices built from explicit covers get
    /// `custom(<size>)`.
    pub fn label(&self) -> &str {
        &self.inner.label
    }

    /// The same lattice under a different display label. The new handle
    /// keeps the original's identity, so elements of one are accepted by
    /// the other.
    pub fn relabeled(&self, label: impl Into<String>) -> Lattice {
        let i = &*self.inner;
        Lattice {
            inner: Arc::new(Inner {
                id: i.id,
                label: label.into(),
                names: i.names.clone(),
                by_name: i.by_name.clone(),
                up: i.up.clone(),
                down: i.down.clone(),
                meet: i.meet.clone(),
                join: i.join.clone(),
                covers: i.covers.clone(),
                bottom: i.bottom,
                top: i.top,
            }),
        }
    }

    pub fn bottom(&self) -> Element {
        self.el(self.inner.bottom)
    }

    pub fn top(&self) -> Element {
        self.el(self.inner.top)
    }

    /// The element with the given dense index.
    ///
    /// Panics if `index >= self.size()`.
    pub fn element(&self, index: usize) -> Element {
        assert!(index < self.size(), "element index {index} out of range");
        self.el(index as u8)
    }

    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        (0..self.size()).map(|i| self.el(i as u8))
    }

    pub fn by_name(&self, name: &str) -> Option<Element> {
        self.inner.by_name.get(name).map(|&i| self.el(i))
    }

    /// Like [`by_name`](Self::by_name) but with an error for unknown names,
    /// for use at file and CLI boundaries.
    pub fn element_named(&self, name: &str) -> Result<Element, LatticeError> {
        self.by_name(name)
            .ok_or_else(|| LatticeError::UnknownElement(name.to_owned()))
    }

    pub fn name(&self, x: Element) -> &str {
        self.check(x);
        &self.inner.names[x.index()]
    }

    /// Renders a tuple of elements as `(a,b,c)`.
    pub fn format_tuple(&self, xs: &[Element]) -> String {
        let names: Vec<&str> = xs.iter().map(|&x| self.name(x)).collect();
        format!("({})", names.join(","))
    }

    pub fn leq(&self, x: Element, y: Element) -> bool {
        self.check(x);
        self.check(y);
        self.leq_u(x.idx(), y.idx())
    }

    pub fn meet(&self, x: Element, y: Element) -> Element {
        self.check(x);
        self.check(y);
        self.el(self.meet_u(x.idx(), y.idx()))
    }

    pub fn join(&self, x: Element, y: Element) -> Element {
        self.check(x);
        self.check(y);
        self.el(self.join_u(x.idx(), y.idx()))
    }

    /// The ternary median `(x \/ y) /\ (x \/ z) /\ (y \/ z)`.
    pub fn med(&self, x: Element, y: Element, z: Element) -> Element {
        self.check(x);
        self.check(y);
        self.check(z);
        self.el(self.med_u(x.idx(), y.idx(), z.idx()))
    }

    /// True iff the set is convex: whenever x <= y <= z with x and z in the
    /// set, y is in the set too. The empty set is convex.
    pub fn is_convex(&self, set: &[Element]) -> bool {
        let mut mask = 0u64;
        for &x in set {
            self.check(x);
            mask |= 1 << x.idx();
        }
        self.is_convex_mask(mask)
    }

    /// The cover relation (Hasse diagram) as `(lower, upper)` index pairs,
    /// sorted. This is recomputed from the order, so redundant input edges do
    /// not survive a round trip.
    pub fn cover_pairs(&self) -> Vec<(usize, usize)> {
        self.inner
            .covers
            .iter()
            .map(|&(a, b)| (a as usize, b as usize))
            .collect()
    }

    pub fn element_names(&self) -> &[String] {
        &self.inner.names
    }

    pub fn is_chain(&self) -> bool {
        let full = full_mask(self.size());
        (0..self.size()).all(|x| self.inner.up[x] | self.inner.down[x] == full)
    }

    /// True iff both handles present the identical lattice: same element
    /// names in the same order and the same cover relation.
    pub fn same_presentation(&self, other: &Lattice) -> bool {
        self.inner.id == other.inner.id
            || (self.inner.names == other.inner.names && self.inner.covers == other.inner.covers)
    }

    /// True iff `x` belongs to this lattice.
    pub fn owns(&self, x: Element) -> bool {
        x.lattice_id == self.inner.id
    }

    #[track_caller]
    fn check(&self, x: Element) {
        assert!(
            self.owns(x),
            "element #{} belongs to a different lattice than {}",
            x.index(),
            self.label()
        );
    }

    pub(crate) fn el(&self, index: u8) -> Element {
        debug_assert!((index as usize) < self.size());
        Element {
            lattice_id: self.inner.id,
            index,
        }
    }

    pub(crate) fn size_u(&self) -> u8 {
        self.size() as u8
    }

    pub(crate) fn bottom_u(&self) -> u8 {
        self.inner.bottom
    }

    pub(crate) fn top_u(&self) -> u8 {
        self.inner.top
    }

    pub(crate) fn leq_u(&self, x: u8, y: u8) -> bool {
        self.inner.up[x as usize] >> y & 1 == 1
    }

    pub(crate) fn meet_u(&self, x: u8, y: u8) -> u8 {
        self.inner.meet[x as usize * self.size() + y as usize]
    }

    pub(crate) fn join_u(&self, x: u8, y: u8) -> u8 {
        self.inner.join[x as usize * self.size() + y as usize]
    }

    pub(crate) fn med_u(&self, x: u8, y: u8, z: u8) -> u8 {
        self.meet_u(
            self.meet_u(self.join_u(x, y), self.join_u(x, z)),
            self.join_u(y, z),
        )
    }

    pub(crate) fn is_convex_mask(&self, mask: u64) -> bool {
        for y in 0..self.size() {
            if mask >> y & 1 == 0
                && self.inner.down[y] & mask != 0
                && self.inner.up[y] & mask != 0
            {
                return false;
            }
        }
        true
    }
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// If `s` is wrapped in one matching pair of parentheses, returns the inside.
fn strip_balanced_parens(s: &str) -> Option<&str> {
    let inner = s.strip_prefix('(')?.strip_suffix(')')?;
    let mut depth = 0i32;
    for ch in inner.chars() {
        match ch {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return None;
                }
            }
            _ => {}
        }
    }
    (depth == 0).then_some(inner)
}

/// Kahn topological sort over the cover digraph; `None` on a cycle.
fn topological_order(children: &[Vec<u8>]) -> Option<Vec<u8>> {
    let n = children.len();
    let mut indegree = vec![0usize; n];
    for kids in children {
        for &c in kids {
            indegree[c as usize] += 1;
        }
    }
    let mut queue: Vec<u8> = (0..n as u8).filter(|&x| indegree[x as usize] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(x) = queue.pop() {
        order.push(x);
        for &c in &children[x as usize] {
            indegree[c as usize] -= 1;
            if indegree[c as usize] == 0 {
                queue.push(c);
            }
        }
    }
    (order.len() == n).then_some(order)
}

/// Given a set of candidates and the ideal (or filter) table, finds the
/// candidate that dominates all others, i.e. the greatest lower bound when
/// called with ideals, the least upper bound with filters.
fn extremum(candidates: u64, dominates: &[u64]) -> Option<u8> {
    let mut rest = candidates;
    while rest != 0 {
        let c = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        if candidates & !dominates[c] == 0 {
            return Some(c as u8);
        }
    }
    None
}
