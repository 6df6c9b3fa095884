//! Flow index of banded unitaries on an integer lattice with internal (block) structure.
//!
//! Blocks are indexed target-first: `B_xy = <x| U |y>` maps site `y` to site `x`. With this
//! convention the raising translation `|j> -> |j+1>` has index `+1`.
//!
//! Windows have open boundaries. The index is evaluated as a sum over entries within `band`
//! of the cut, which is exact for strictly banded operators as long as the cut neighborhood
//! stays clear of the window edges, so truncation defects at the edges never enter.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::battery::{shift_operators, LadderHamiltonian};
use crate::error::{dim_err, Error, Result};
use crate::quantum::{unitarity_residual, CMatrix, UnitaryOperator};

/// Global unitarity threshold below which no near-cut fallback is needed.
pub const UNITARY_TOL: f64 = 1e-10;
/// Integrality threshold for [`FlowIndexReport::is_integral`].
pub const INTEGRALITY_TOL: f64 = 1e-8;
const LOCALITY_REL_TOL: f64 = 1e-12;

/// Contiguous sites `first_label..first_label + sites`, each carrying `internal_dim` states.
/// Flattened index of `(site, a)` is `(site - first_label) * internal_dim + a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Lattice {
    pub first_label: i64,
    pub sites: usize,
    pub internal_dim: usize,
}

impl Lattice {
    /// Sites `-half_width..=half_width`.
    pub fn window(half_width: usize, internal_dim: usize) -> Self {
        Self {
            first_label: -(half_width as i64),
            sites: 2 * half_width + 1,
            internal_dim,
        }
    }

    pub fn from_ladder(h: &LadderHamiltonian, internal_dim: usize) -> Self {
        Self {
            first_label: h.first_label(),
            sites: h.dim(),
            internal_dim,
        }
    }

    pub fn last_label(&self) -> i64 {
        self.first_label + self.sites as i64 - 1
    }

    pub fn dim(&self) -> usize {
        self.sites * self.internal_dim
    }

    pub fn contains(&self, label: i64) -> bool {
        (self.first_label..=self.last_label()).contains(&label)
    }

    pub fn site_of(&self, index: usize) -> i64 {
        self.first_label + (index / self.internal_dim) as i64
    }

    /// Flattened indices of all internal states on `label`.
    pub fn indices(&self, label: i64) -> std::ops::Range<usize> {
        let start = (label - self.first_label) as usize * self.internal_dim;
        start..start + self.internal_dim
    }

    /// Whether `cut` leaves `band` sites on each side strictly inside the window.
    fn admits(&self, cut: i64, band: usize) -> bool {
        let band = band as i64;
        cut - band > self.first_label && cut + band < self.last_label()
    }
}

fn site_distance(lattice: &Lattice, i: usize, j: usize) -> usize {
    lattice.site_of(i).abs_diff(lattice.site_of(j)) as usize
}

/// Operator on a windowed lattice whose blocks vanish beyond `band` sites from the diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedBlockUnitary {
    lattice: Lattice,
    band: usize,
    matrix: CMatrix,
    /// Largest entry modulus dropped when the band was imposed.
    truncation_error: f64,
}

impl BandedBlockUnitary {
    /// Keeps blocks with `|x - y| <= band` and records the largest dropped entry.
    pub fn from_dense(matrix: CMatrix, lattice: Lattice, band: usize) -> Result<Self> {
        let n = lattice.dim();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(dim_err(format!(
                "operator is {}x{}, lattice needs {n}x{n}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let mut matrix = matrix;
        let mut truncation_error = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                if site_distance(&lattice, i, j) > band {
                    truncation_error = truncation_error.max(matrix[(i, j)].norm());
                    matrix[(i, j)] = Complex64::new(0.0, 0.0);
                }
            }
        }
        Ok(Self {
            lattice,
            band,
            matrix,
            truncation_error,
        })
    }

    /// Smallest band whose dropped entries are all at most `tol` in modulus.
    pub fn from_dense_truncated(matrix: CMatrix, lattice: Lattice, tol: f64) -> Result<Self> {
        let n = lattice.dim();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(dim_err(format!(
                "operator is {}x{}, lattice needs {n}x{n}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let mut band = 0;
        for i in 0..n {
            for j in 0..n {
                if matrix[(i, j)].norm() > tol {
                    band = band.max(site_distance(&lattice, i, j));
                }
            }
        }
        Self::from_dense(matrix, lattice, band)
    }

    /// `T^k (x) I_m` on a window, `T|j> = |j+1>`; negative `k` gives powers of `T^dag`.
    /// Amplitude shifted past an edge is lost, as for the finite ladder.
    pub fn shift_power(half_width: usize, internal_dim: usize, k: i64) -> Result<Self> {
        let lattice = Lattice::window(half_width, internal_dim);
        let h = LadderHamiltonian::double_sided(half_width, 1.0)?;
        let (s, t) = shift_operators(&h);
        let step = if k >= 0 { t } else { s };
        let mut m = CMatrix::identity(lattice.sites, lattice.sites);
        for _ in 0..k.unsigned_abs() {
            m = &step * m;
        }
        let m = m.kronecker(&CMatrix::identity(internal_dim, internal_dim));
        Self::from_dense(m, lattice, k.unsigned_abs() as usize)
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn band(&self) -> usize {
        self.band
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn truncation_error(&self) -> f64 {
        self.truncation_error
    }

    /// `B_xy = <x| U |y>`, an `m x m` block; zero outside the band.
    pub fn block(&self, x: i64, y: i64) -> CMatrix {
        let m = self.lattice.internal_dim;
        if !self.lattice.contains(x) || !self.lattice.contains(y) {
            return CMatrix::zeros(m, m);
        }
        let (r, c) = (self.lattice.indices(x).start, self.lattice.indices(y).start);
        self.matrix.view((r, c), (m, m)).into_owned()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
            ..self.clone()
        }
    }

    /// `self * other` (`other` acts first); the band is recomputed from the product.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.lattice != other.lattice {
            return Err(dim_err("composing operators on different lattices"));
        }
        let product = &self.matrix * &other.matrix;
        let mut out = Self::from_dense(product, self.lattice, self.band + other.band)?;
        out.truncation_error = self.truncation_error + other.truncation_error;
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlowIndexReport {
    pub raw_value: f64,
    pub rounded: i64,
    pub residual: f64,
    pub cut_position: i64,
    pub band: usize,
    /// `max |U^dag U - I|` on the whole window.
    pub unitarity_residual: f64,
    /// Set when the window operator is not unitary; the value then rests on
    /// `near_cut_isometry_residual`.
    pub unitarity_warning: bool,
    /// Orthonormality defect of the rows and columns within `band + 1` sites of the cut.
    pub near_cut_isometry_residual: f64,
    pub truncation_error: f64,
}

impl FlowIndexReport {
    pub fn is_integral(&self) -> bool {
        self.residual <= INTEGRALITY_TOL
    }
}

/// `nu = sum_{x >= cut > y} Tr[B_xy^dag B_xy - B_yx^dag B_yx]`.
pub fn flow_index(u: &BandedBlockUnitary, cut: i64) -> Result<FlowIndexReport> {
    let lat = u.lattice;
    let band = u.band;
    if !lat.admits(cut, band) {
        return Err(Error::BandTooWide {
            band,
            cut,
            detail: format!("window is [{}, {}]", lat.first_label, lat.last_label()),
        });
    }
    let reach = band as i64;
    let mut raw_value = 0.0;
    for x in cut..cut + reach {
        for y in (cut - reach)..cut {
            if x - y > reach {
                continue;
            }
            let forward = u.block(x, y).norm_squared();
            let backward = u.block(y, x).norm_squared();
            raw_value += forward - backward;
        }
    }
    let rounded = raw_value.round() as i64;
    let unitarity_residual = unitarity_residual(&u.matrix);
    let near = near_cut_isometry(u, cut);
    Ok(FlowIndexReport {
        raw_value,
        rounded,
        residual: (raw_value - rounded as f64).abs(),
        cut_position: cut,
        band,
        unitarity_residual,
        unitarity_warning: unitarity_residual > UNITARY_TOL,
        near_cut_isometry_residual: near,
        truncation_error: u.truncation_error,
    })
}

fn near_cut_isometry(u: &BandedBlockUnitary, cut: i64) -> f64 {
    let lat = u.lattice;
    let reach = u.band as i64 + 1;
    let lo = (cut - reach).max(lat.first_label);
    let hi = (cut + reach - 1).min(lat.last_label());
    let idx: Vec<usize> = (lo..=hi).flat_map(|x| lat.indices(x)).collect();
    let cols = u.matrix.select_columns(&idx);
    let rows = u.matrix.select_rows(&idx);
    let k = idx.len();
    let id = CMatrix::identity(k, k);
    let col_defect = crate::quantum::max_abs(&(cols.adjoint() * &cols - &id));
    let row_defect = crate::quantum::max_abs(&(&rows * rows.adjoint() - &id));
    col_defect.max(row_defect)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocalityViolation {
    pub n: i64,
    pub n_prime: i64,
    /// `|H_{n n'}| - C exp(-|n - n'| / l)`; positive means the bound fails.
    pub excess: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocalityReport {
    pub ok: bool,
    /// Entry with the largest excess over the bound, violated or not.
    pub worst: LocalityViolation,
}

/// Checks `|<n|H|n'>| <= C exp(-|n - n'| / l)` entrywise, with `n`, `n'` the site labels.
pub fn locality_check(h: &CMatrix, lattice: &Lattice, c: f64, l: f64) -> Result<LocalityReport> {
    if c <= 0.0 || l <= 0.0 {
        return Err(Error::Contract(format!(
            "locality constants must be positive (C={c}, l={l})"
        )));
    }
    let n = lattice.dim();
    if h.nrows() != n || h.ncols() != n {
        return Err(dim_err("generator does not match lattice"));
    }
    let mut worst = LocalityViolation {
        n: 0,
        n_prime: 0,
        excess: f64::NEG_INFINITY,
    };
    let mut ok = true;
    for i in 0..n {
        for j in 0..n {
            let d = site_distance(lattice, i, j) as f64;
            let bound = c * (-d / l).exp();
            let excess = h[(i, j)].norm() - bound;
            if excess > LOCALITY_REL_TOL * bound {
                ok = false;
            }
            if excess > worst.excess {
                worst = LocalityViolation {
                    n: lattice.site_of(i),
                    n_prime: lattice.site_of(j),
                    excess,
                };
            }
        }
    }
    Ok(LocalityReport { ok, worst })
}

/// Views a `battery (x) qubit` operator as a lattice over battery labels with a
/// two-dimensional internal space.
pub fn flatten_composite(u: &UnitaryOperator, h: &LadderHamiltonian) -> Result<BandedBlockUnitary> {
    let lattice = Lattice::from_ladder(h, crate::protocols::QUBIT_DIM);
    if u.dim() != lattice.dim() {
        return Err(dim_err(format!(
            "unitary has dimension {}, ladder x qubit is {}",
            u.dim(),
            lattice.dim()
        )));
    }
    let banded = BandedBlockUnitary::from_dense_truncated(u.matrix().clone(), lattice, 1e-12)?;
    if 2 * banded.band + 3 > lattice.sites {
        return Err(Error::BandTooWide {
            band: banded.band,
            cut: 0,
            detail: format!("no cut fits in a window of {} sites", lattice.sites),
        });
    }
    Ok(banded)
}

/// Random Hermitian generator with entries of modulus at most `entry_bound` on blocks within
/// `band` sites, zero elsewhere.
pub fn random_banded_hermitian<R: Rng + ?Sized>(
    lattice: &Lattice,
    band: usize,
    entry_bound: f64,
    rng: &mut R,
) -> CMatrix {
    let n = lattice.dim();
    let half = entry_bound / std::f64::consts::SQRT_2;
    let mut h = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            if site_distance(lattice, i, j) > band {
                continue;
            }
            if i == j {
                h[(i, i)] = Complex64::new(rng.random_range(-entry_bound..=entry_bound), 0.0);
            } else {
                let z = Complex64::new(
                    rng.random_range(-half..=half),
                    rng.random_range(-half..=half),
                );
                h[(i, j)] = z;
                h[(j, i)] = z.conj();
            }
        }
    }
    h
}
