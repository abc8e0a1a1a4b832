//! The spinful Fermi-Hubbard model and its spinless embeddings.

use alloc::vec::Vec;
use core::fmt;

/// Spin label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub const BOTH: [Spin; 2] = [Spin::Up, Spin::Down];

    pub const fn index(self) -> usize {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }

    pub const fn label(self) -> &'static str {
        match self {
            Spin::Up => "up",
            Spin::Down => "down",
        }
    }
}

/// How the two spin species are laid out as spinless modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellScheme {
    /// Two `lx × ly` grids, one per species.
    Separated,
    /// One `2·lx × ly` grid; spin-up on even columns, spin-down on odd.
    Interleaved,
}

impl CellScheme {
    pub const fn label(self) -> &'static str {
        match self {
            CellScheme::Separated => "separated",
            CellScheme::Interleaved => "interleaved",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelError {
    EmptyLattice { lx: usize, ly: usize },
    NonFinite(&'static str),
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::EmptyLattice { lx, ly } => write!(f, "lattice {lx}x{ly} must have lx, ly >= 1"),
            ModelError::NonFinite(name) => write!(f, "parameter {name} must be finite"),
        }
    }
}

impl core::error::Error for ModelError {}

/// Spinful Hubbard model on an `lx × ly` open-boundary square lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HubbardModel {
    pub lx: usize,
    pub ly: usize,
    pub j: f64,
    pub u: f64,
}

/// A spinful lattice site `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Site {
    pub x: usize,
    pub y: usize,
}

/// A term of the spinful Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpinfulTerm {
    /// `amplitude · Σ_σ-fixed (c†_a c_b + h.c.)` for one spin.
    Hopping { a: Site, b: Site, spin: Spin, amplitude: f64 },
    /// `amplitude · n_{s,↑} n_{s,↓}`.
    Interaction { site: Site, amplitude: f64 },
}

impl HubbardModel {
    pub fn new(lx: usize, ly: usize, j: f64, u: f64) -> Result<Self, ModelError> {
        if lx == 0 || ly == 0 {
            return Err(ModelError::EmptyLattice { lx, ly });
        }
        if !j.is_finite() {
            return Err(ModelError::NonFinite("j"));
        }
        if !u.is_finite() {
            return Err(ModelError::NonFinite("u"));
        }
        Ok(HubbardModel { lx, ly, j, u })
    }

    pub fn n_sites(&self) -> usize {
        self.lx * self.ly
    }
}

/// All nearest-neighbour hoppings per spin and all on-site interactions.
pub fn enumerate_terms(m: &HubbardModel) -> Vec<SpinfulTerm> {
    let mut out = Vec::new();
    for spin in Spin::BOTH {
        for y in 0..m.ly {
            for x in 0..m.lx {
                let a = Site { x, y };
                if x + 1 < m.lx {
                    out.push(SpinfulTerm::Hopping { a, b: Site { x: x + 1, y }, spin, amplitude: -m.j });
                }
                if y + 1 < m.ly {
                    out.push(SpinfulTerm::Hopping { a, b: Site { x, y: y + 1 }, spin, amplitude: -m.j });
                }
            }
        }
    }
    for y in 0..m.ly {
        for x in 0..m.lx {
            out.push(SpinfulTerm::Interaction { site: Site { x, y }, amplitude: m.u });
        }
    }
    out
}

/// A rectangular grid of spinless modes. Sites are numbered row-major from
/// `offset`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Block {
    pub width: usize,
    pub height: usize,
    pub offset: usize,
}

impl Block {
    pub fn n_sites(&self) -> usize {
        self.width * self.height
    }

    pub fn site(&self, x: usize, y: usize) -> usize {
        debug_assert!(x < self.width && y < self.height);
        self.offset + y * self.width + x
    }

    pub fn contains(&self, s: usize) -> bool {
        s >= self.offset && s < self.offset + self.n_sites()
    }

    /// Local `(x, y)` of a global site index inside this block.
    pub fn coords(&self, s: usize) -> (usize, usize) {
        let l = s - self.offset;
        (l % self.width, l / self.width)
    }
}

/// Spinless hopping along a lattice path (length 1 or 2 bonds).
#[derive(Debug, Clone, PartialEq)]
pub struct HoppingTerm {
    /// Sites from one end to the other; consecutive entries are neighbours.
    pub path: Vec<usize>,
    pub amplitude: f64,
    pub spin: Spin,
}

impl HoppingTerm {
    pub fn ends(&self) -> (usize, usize) {
        (self.path[0], *self.path.last().expect("non-empty path"))
    }
}

/// Density-density term `amplitude · n_a n_b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractionTerm {
    pub a: usize,
    pub b: usize,
    pub amplitude: f64,
}

/// Spinless lattice produced by [`to_spinless`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpinlessLattice {
    pub model: HubbardModel,
    pub scheme: CellScheme,
    pub blocks: Vec<Block>,
    pub hoppings: Vec<HoppingTerm>,
    pub interactions: Vec<InteractionTerm>,
}

impl SpinlessLattice {
    pub fn n_sites(&self) -> usize {
        self.blocks.iter().map(Block::n_sites).sum()
    }

    /// Spinless index of the spinful mode `(site, spin)`.
    pub fn site_of(&self, site: Site, spin: Spin) -> usize {
        match self.scheme {
            CellScheme::Separated => self.blocks[spin.index()].site(site.x, site.y),
            CellScheme::Interleaved => self.blocks[0].site(2 * site.x + spin.index(), site.y),
        }
    }

    /// Inverse of [`site_of`](Self::site_of).
    pub fn spinful_of(&self, s: usize) -> (Site, Spin) {
        match self.scheme {
            CellScheme::Separated => {
                let b = if self.blocks[0].contains(s) { 0 } else { 1 };
                let (x, y) = self.blocks[b].coords(s);
                (Site { x, y }, Spin::BOTH[b])
            }
            CellScheme::Interleaved => {
                let (x, y) = self.blocks[0].coords(s);
                (Site { x: x / 2, y }, Spin::BOTH[x % 2])
            }
        }
    }

    /// Block index and local coordinates of a site.
    pub fn locate(&self, s: usize) -> (usize, usize, usize) {
        for (b, blk) in self.blocks.iter().enumerate() {
            if blk.contains(s) {
                let (x, y) = blk.coords(s);
                return (b, x, y);
            }
        }
        panic!("site {s} out of range");
    }

    /// True iff `a` and `b` are nearest neighbours inside one block.
    pub fn are_neighbors(&self, a: usize, b: usize) -> bool {
        if a >= self.n_sites() || b >= self.n_sites() {
            return false;
        }
        let (ba, xa, ya) = self.locate(a);
        let (bb, xb, yb) = self.locate(b);
        ba == bb && xa.abs_diff(xb) + ya.abs_diff(yb) == 1
    }
}

/// Embeds the spinful model as spinless modes.
pub fn to_spinless(m: &HubbardModel, scheme: CellScheme) -> SpinlessLattice {
    let blocks = match scheme {
        CellScheme::Separated => (0..2)
            .map(|b| Block { width: m.lx, height: m.ly, offset: b * m.n_sites() })
            .collect(),
        CellScheme::Interleaved => alloc::vec![Block { width: 2 * m.lx, height: m.ly, offset: 0 }],
    };
    let mut lat = SpinlessLattice { model: *m, scheme, blocks, hoppings: Vec::new(), interactions: Vec::new() };
    for term in enumerate_terms(m) {
        match term {
            SpinfulTerm::Hopping { a, b, spin, amplitude } => {
                let sa = lat.site_of(a, spin);
                let sb = lat.site_of(b, spin);
                let path = if scheme == CellScheme::Interleaved && a.y == b.y {
                    // Horizontal spinful bonds skip over the other species.
                    let (b0, xa, ya) = lat.locate(sa);
                    let mid = lat.blocks[b0].site(xa + 1, ya);
                    alloc::vec![sa, mid, sb]
                } else {
                    alloc::vec![sa, sb]
                };
                lat.hoppings.push(HoppingTerm { path, amplitude, spin });
            }
            SpinfulTerm::Interaction { site, amplitude } => {
                let a = lat.site_of(site, Spin::Up);
                let b = lat.site_of(site, Spin::Down);
                lat.interactions.push(InteractionTerm { a, b, amplitude });
            }
        }
    }
    lat
}
