use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};
use crate::operators::QubitHamiltonian;
use crate::simulator::{
    hadamard_test, hadamard_test_weighted, Basis, Estimate, MeasurementBackend, Propagator, StateVector,
};

/// Uniform grid t_j = jΔt for j = 0…N_T.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub dt: f64,
    pub nt: usize,
}

impl TimeGrid {
    pub fn new(dt: f64, nt: usize) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidInput(format!(
                "time step must be positive and finite, got {dt}"
            )));
        }
        Ok(Self { dt, nt })
    }

    /// Number of basis states N_T + 1.
    pub fn dim(&self) -> usize {
        self.nt + 1
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.nt).map(|j| j as f64 * self.dt).collect()
    }
}

/// Which propagator produced the time-evolved states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Exact,
    Trotter,
    Vff,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::Exact => "exact",
            Provenance::Trotter => "trotter",
            Provenance::Vff => "vff",
        }
    }
}

/// s_m = ⟨Φ₀|U^m|Φ₀⟩ for m = 0…len−1, with per-part sampling variances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapRow {
    pub dt: f64,
    pub entries: Vec<C64>,
    /// (variance of Re, variance of Im) per entry.
    pub variances: Vec<(f64, f64)>,
}

impl OverlapRow {
    pub fn from_entries(dt: f64, entries: Vec<C64>) -> Self {
        let variances = vec![(0.0, 0.0); entries.len()];
        Self { dt, entries, variances }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// s_m with s_{−m} = conj(s_m).
    pub fn lag(&self, m: i64) -> C64 {
        let v = self.entries[m.unsigned_abs() as usize];
        if m < 0 {
            v.conj()
        } else {
            v
        }
    }

    fn require(&self, needed: usize) -> Result<()> {
        if self.entries.len() < needed {
            return Err(Error::RowTooShort {
                needed,
                got: self.entries.len(),
            });
        }
        Ok(())
    }
}

/// Sampling-stream id for one matrix element, unique per kind, part and indices.
pub(crate) fn element_stream(kind: u64, basis: Basis, j: usize, k: usize) -> u64 {
    let b = match basis {
        Basis::Z => 0,
        Basis::Y => 1,
    };
    (kind << 56) | (b << 48) | ((j as u64 & 0xff_ffff) << 24) | (k as u64 & 0xff_ffff)
}

const ROW_STREAM: u64 = 1;
const H_STREAM: u64 = 2;
const GRAM_STREAM: u64 = 3;

fn measure_pair(
    f: impl Fn(Basis, u64) -> Result<Estimate>,
    kind: u64,
    j: usize,
    k: usize,
) -> Result<(C64, (f64, f64))> {
    let re = f(Basis::Z, element_stream(kind, Basis::Z, j, k))?;
    let im = f(Basis::Y, element_stream(kind, Basis::Y, j, k))?;
    Ok((C64::new(re.value, im.value), (re.variance, im.variance)))
}

/// Measure s_0…s_{N_T+1} with Hadamard tests between the reference and U^m|Φ₀⟩.
pub fn build_overlap_row(
    prop: &dyn Propagator,
    phi0: &StateVector,
    grid: &TimeGrid,
    backend: &MeasurementBackend,
) -> Result<OverlapRow> {
    let measured: Vec<(C64, (f64, f64))> = (0..=grid.nt + 1)
        .into_par_iter()
        .map(|m| {
            measure_pair(
                |b, s| hadamard_test(prop, 0, m as i64, phi0, b, backend, s),
                ROW_STREAM,
                0,
                m,
            )
        })
        .collect::<Result<_>>()?;
    let (entries, variances) = measured.into_iter().unzip();
    Ok(OverlapRow {
        dt: grid.dt,
        entries,
        variances,
    })
}

/// Hermitian Toeplitz S_{jk} = s_{k−j} over entries 0…N_T.
pub fn assemble_s(row: &OverlapRow, nt: usize) -> Result<CMatrix> {
    row.require(nt + 1)?;
    let d = nt + 1;
    let s = CMatrix::from_fn(d, d, |j, k| row.lag(k as i64 - j as i64));
    Ok(hermitize(&s))
}

/// U_{jk} = s_{k+1−j}; needs the extra entry s_{N_T+1}.
pub fn build_u_from_row(row: &OverlapRow, nt: usize) -> Result<CMatrix> {
    row.require(nt + 2)?;
    let d = nt + 1;
    Ok(CMatrix::from_fn(d, d, |j, k| row.lag(k as i64 + 1 - j as i64)))
}

pub(crate) fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// A measured complex matrix with per-part element variances.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasuredMatrix {
    pub value: CMatrix,
    pub var_re: DMatrix<f64>,
    pub var_im: DMatrix<f64>,
}

/// H_{jk} = ⟨Φ_j|Ĥ|Φ_k⟩ for all pairs, Hermitized after measurement. When `s`
/// is given the identity term is folded in as c·S_{jk} instead of measured.
pub fn build_h_matrix(
    prop: &dyn Propagator,
    phi0: &StateVector,
    grid: &TimeGrid,
    h: &QubitHamiltonian,
    backend: &MeasurementBackend,
    s: Option<&CMatrix>,
) -> Result<MeasuredMatrix> {
    let d = grid.dim();
    if let Some(s) = s {
        if s.nrows() != d || s.ncols() != d {
            return Err(Error::InvalidInput(format!(
                "overlap matrix is {}x{}, expected {d}x{d}",
                s.nrows(),
                s.ncols()
            )));
        }
    }
    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|j| (0..d).map(move |k| (j, k))).collect();
    let measured: Vec<(C64, (f64, f64))> = pairs
        .par_iter()
        .map(|&(j, k)| {
            measure_pair(
                |b, stream| {
                    let known = s.map(|s| {
                        Estimate::exact(match b {
                            Basis::Z => s[(j, k)].re,
                            Basis::Y => s[(j, k)].im,
                        })
                    });
                    hadamard_test_weighted(prop, j as i64, k as i64, phi0, h, b, backend, stream, known)
                },
                H_STREAM,
                j,
                k,
            )
        })
        .collect::<Result<_>>()?;
    let raw = CMatrix::from_fn(d, d, |j, k| measured[j * d + k].0);
    let vr = |j: usize, k: usize| measured[j * d + k].1 .0;
    let vi = |j: usize, k: usize| measured[j * d + k].1 .1;
    let var_re = DMatrix::from_fn(d, d, |j, k| if j == k { vr(j, j) } else { (vr(j, k) + vr(k, j)) / 4.0 });
    let var_im = DMatrix::from_fn(d, d, |j, k| if j == k { 0.0 } else { (vi(j, k) + vi(k, j)) / 4.0 });
    Ok(MeasuredMatrix {
        value: hermitize(&raw),
        var_re,
        var_im,
    })
}

/// Full Gram path: S_{jk} = ⟨Φ_j|Φ_k⟩ and U_{jk} = ⟨Φ_j|U|Φ_k⟩ from one
/// Hadamard test per element, with no Toeplitz assumption.
pub fn build_gram_matrices(
    prop: &dyn Propagator,
    phi0: &StateVector,
    grid: &TimeGrid,
    backend: &MeasurementBackend,
) -> Result<(CMatrix, CMatrix)> {
    let d = grid.dim();
    let pairs: Vec<(usize, usize, usize)> = (0..2)
        .flat_map(|shift| (0..d).flat_map(move |j| (0..d).map(move |k| (shift, j, k))))
        .collect();
    let values: Vec<C64> = pairs
        .par_iter()
        .map(|&(shift, j, k)| {
            measure_pair(
                |b, stream| hadamard_test(prop, j as i64, (k + shift) as i64, phi0, b, backend, stream),
                GRAM_STREAM + shift as u64,
                j,
                k,
            )
            .map(|(v, _)| v)
        })
        .collect::<Result<_>>()?;
    let s = CMatrix::from_fn(d, d, |j, k| values[j * d + k]);
    let u = CMatrix::from_fn(d, d, |j, k| values[d * d + j * d + k]);
    Ok((hermitize(&s), u))
}

/// S, and optionally H and U, over one time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceMatrices {
    pub grid: TimeGrid,
    pub provenance: Provenance,
    pub backend: MeasurementBackend,
    pub row: Option<OverlapRow>,
    pub s: CMatrix,
    pub h: Option<MeasuredMatrix>,
    /// Identity coefficient folded into H through S, if any.
    pub h_identity: f64,
    pub u: Option<CMatrix>,
}

impl SubspaceMatrices {
    /// S and, when the row is long enough, U from a measured overlap row.
    pub fn from_row(
        row: OverlapRow,
        grid: TimeGrid,
        provenance: Provenance,
        backend: MeasurementBackend,
    ) -> Result<Self> {
        let s = assemble_s(&row, grid.nt)?;
        let u = if row.len() >= grid.nt + 2 {
            Some(build_u_from_row(&row, grid.nt)?)
        } else {
            None
        };
        Ok(Self {
            grid,
            provenance,
            backend,
            row: Some(row),
            s,
            h: None,
            h_identity: 0.0,
            u,
        })
    }

    /// Measure H for these states, folding the identity term through S.
    pub fn measure_h(&mut self, prop: &dyn Propagator, phi0: &StateVector, h: &QubitHamiltonian) -> Result<()> {
        let m = build_h_matrix(prop, phi0, &self.grid, h, &self.backend, Some(&self.s))?;
        self.h = Some(m);
        self.h_identity = h.identity_coefficient();
        Ok(())
    }

    /// Leading (nt+1)×(nt+1) blocks, as if measured on the shorter grid.
    pub fn truncated(&self, nt: usize) -> Result<Self> {
        if nt > self.grid.nt {
            return Err(Error::InvalidInput(format!(
                "cannot extend N_T = {} to {nt}",
                self.grid.nt
            )));
        }
        let grid = TimeGrid::new(self.grid.dt, nt)?;
        let d = nt + 1;
        let block = |m: &CMatrix| m.view((0, 0), (d, d)).into_owned();
        let row = self.row.as_ref().map(|r| {
            let keep = r.len().min(nt + 2);
            OverlapRow {
                dt: r.dt,
                entries: r.entries[..keep].to_vec(),
                variances: r.variances[..keep].to_vec(),
            }
        });
        let u = match &row {
            Some(r) if r.len() >= nt + 2 => Some(build_u_from_row(r, nt)?),
            Some(_) => None,
            None => self.u.as_ref().map(block),
        };
        Ok(Self {
            grid,
            provenance: self.provenance,
            backend: self.backend,
            row,
            s: block(&self.s),
            h: self.h.as_ref().map(|h| MeasuredMatrix {
                value: block(&h.value),
                var_re: h.var_re.view((0, 0), (d, d)).into_owned(),
                var_im: h.var_im.view((0, 0), (d, d)).into_owned(),
            }),
            h_identity: self.h_identity,
            u,
        })
    }

    /// JSON dump with the overlap row and row-major H and U.
    pub fn to_json(&self) -> serde_json::Value {
        let pairs = |vals: &mut dyn Iterator<Item = C64>| -> serde_json::Value {
            vals.map(|z| serde_json::json!([z.re, z.im])).collect::<Vec<_>>().into()
        };
        let row_major = |m: &CMatrix| {
            let d = m.nrows();
            pairs(&mut (0..d * d).map(|i| m[(i / d, i % d)]))
        };
        let mut obj = serde_json::json!({
            "dt": self.grid.dt,
            "nt": self.grid.nt,
            "provenance": self.provenance.as_str(),
            "s_row": match &self.row {
                Some(r) => pairs(&mut r.entries.iter().copied()),
                None => pairs(&mut (0..self.grid.dim()).map(|k| self.s[(0, k)])),
            },
        });
        if let Some(h) = &self.h {
            obj["H"] = row_major(&h.value);
        }
        if let Some(u) = &self.u {
            obj["U"] = row_major(u);
        }
        obj
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn toeplitz_from_row() {
        let (a, b) = (c(0.5, 0.2), c(-0.1, 0.3));
        let row = OverlapRow::from_entries(0.1, vec![c(1.0, 0.0), a, b]);
        let s = assemble_s(&row, 2).unwrap();
        let want = CMatrix::from_row_slice(
            3,
            3,
            &[
                c(1.0, 0.0),
                a,
                b,
                a.conj(),
                c(1.0, 0.0),
                a,
                b.conj(),
                a.conj(),
                c(1.0, 0.0),
            ],
        );
        assert!(max_abs_diff(&s, &want) < 1e-15);
        assert!(matches!(
            assemble_s(&row, 3),
            Err(Error::RowTooShort { needed: 4, got: 3 })
        ));
    }

    #[test]
    fn unitary_from_row() {
        let (a, b) = (c(0.5, 0.2), c(-0.1, 0.3));
        let row = OverlapRow::from_entries(0.1, vec![c(1.0, 0.0), a, b]);
        let u = build_u_from_row(&row, 1).unwrap();
        let want = CMatrix::from_row_slice(2, 2, &[a, b, c(1.0, 0.0), a]);
        assert!(max_abs_diff(&u, &want) < 1e-15);
        assert!(build_u_from_row(&row, 2).is_err());
    }

    #[test]
    fn ones_row_is_rank_one() {
        let row = OverlapRow::from_entries(0.1, vec![c(1.0, 0.0); 3]);
        let s = assemble_s(&row, 2).unwrap();
        assert!(max_abs_diff(&s, &CMatrix::from_element(3, 3, c(1.0, 0.0))) < 1e-15);
    }

    #[test]
    fn streams_are_distinct() {
        let mut seen = std::collections::HashSet::new();
        for kind in 1..4 {
            for basis in [Basis::Z, Basis::Y] {
                for j in 0..5 {
                    for k in 0..5 {
                        assert!(seen.insert(element_stream(kind, basis, j, k)));
                    }
                }
            }
        }
    }
}
