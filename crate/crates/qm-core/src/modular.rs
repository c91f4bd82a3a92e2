//! Genus-one modular data (S, T, central charge) and genus-g state-space
//! dimensions attached to a nondegenerate finite quadratic module.
//!
//! S and T are stored as exact Q/Z exponents plus the common scale
//! |G|^{-1/2}; floating matrices are materialized only for relation checks
//! and export.

use num_bigint::BigUint;

use crate::dense::DenseForm;
use crate::error::{Error, Result};
use crate::exact::FracMod1;
use crate::fqm::{FiniteQuadraticModule, GroupElement};
use crate::guards::Guards;

/// Exact genus-one data. Entry (u,v) of S is |G|^{-1/2}·exp(2πi·b(u,v));
/// entry (u,u) of T is exp(2πi·Q(u)); the central charge c satisfies
/// |G|^{-1/2}·Σ exp(2πi·Q(x)) = exp(2πi·c/8).
pub struct ModularData {
    /// All group elements, label 0 first, in lexicographic coefficient order.
    pub labels: Vec<GroupElement>,
    pub s_exponents: Vec<Vec<FracMod1>>,
    pub t_exponents: Vec<FracMod1>,
    /// |G|; the S-matrix scale is order^{-1/2}.
    pub order: BigUint,
    /// Central charge mod 8.
    pub central_charge: u8,
}

#[derive(Clone, Copy)]
struct Cplx {
    re: f64,
    im: f64,
}

impl Cplx {
    fn mul(self, o: Cplx) -> Cplx {
        Cplx {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }
    fn abs(self) -> f64 {
        self.re.hypot(self.im)
    }
}

/// Gauss sum of a dense module, unscaled.
fn dense_gauss_sum(d: &DenseForm) -> (f64, f64) {
    let mut re = 0.0;
    let mut im = 0.0;
    for idx in 0..d.total {
        let q = d.q_of(&d.coords_of(idx));
        let theta = 2.0 * std::f64::consts::PI * (q as f64) / (d.modulus as f64);
        re += theta.cos();
        im += theta.sin();
    }
    (re, im)
}

/// Central charge mod 8 by matching the normalized Gauss sum against the
/// eight candidate roots of unity (tolerance 1e-6; the exact value is always
/// an eighth root for a nondegenerate module). A Gauss sum of the wrong
/// magnitude (off √|G| by more than 1e-9 relatively) means the module is
/// degenerate.
pub fn central_charge(m: &FiniteQuadraticModule, guards: &Guards) -> Result<u8> {
    if m.is_trivial() {
        return Ok(0);
    }
    let dense = DenseForm::new(m, guards.max_module_order)?;
    let (re, im) = dense_gauss_sum(&dense);
    let mag = re.hypot(im);
    let sqrt_n = (dense.total as f64).sqrt();
    if (mag - sqrt_n).abs() > 1e-9 * sqrt_n.max(1.0) {
        return Err(Error::DegenerateModule);
    }
    let (ure, uim) = (re / mag, im / mag);
    for c in 0u8..8 {
        let theta = 2.0 * std::f64::consts::PI * (c as f64) / 8.0;
        let d = ((ure - theta.cos()).powi(2) + (uim - theta.sin()).powi(2)).sqrt();
        if d < 1e-6 {
            return Ok(c);
        }
    }
    Err(Error::Internal(
        "Gauss sum phase is not an eighth root of unity".into(),
    ))
}

/// Assemble the exact genus-one data.
pub fn modular_data(m: &FiniteQuadraticModule, guards: &Guards) -> Result<ModularData> {
    let c = central_charge(m, guards)?; // also rejects degenerate modules
    let labels: Vec<GroupElement> = if m.is_trivial() {
        vec![m.zero()]
    } else {
        m.elements().collect()
    };
    let t_exponents: Vec<FracMod1> = labels.iter().map(|u| m.eval_q(u)).collect();
    let s_exponents: Vec<Vec<FracMod1>> = labels
        .iter()
        .map(|u| labels.iter().map(|v| m.eval_b(u, v)).collect())
        .collect();
    Ok(ModularData {
        labels,
        s_exponents,
        t_exponents,
        order: m.order(),
        central_charge: c,
    })
}

/// dim H(Σ_g) = |G|^g.
pub fn state_space_dim(m: &FiniteQuadraticModule, genus: u32) -> BigUint {
    m.order().pow(genus)
}

/// Pointed fusion is the group law: N^w_{uv} = 1 iff w = u + v.
pub fn fusion(
    m: &FiniteQuadraticModule,
    u: &GroupElement,
    v: &GroupElement,
) -> GroupElement {
    m.add(u, v)
}

/// One verified relation: pass/fail at the tolerance plus the deviation seen.
#[derive(Debug, Clone, Copy)]
pub struct Check {
    pub pass: bool,
    pub max_deviation: f64,
}

/// Consistency report for the (S, T, c) data.
#[derive(Debug, Clone, Copy)]
pub struct RelationReport {
    /// S·S̄ᵀ = 1.
    pub unitary: Check,
    /// S = Sᵀ.
    pub symmetric: Check,
    /// S² = C with C the permutation u ↦ -u.
    pub s_squared_is_conjugation: Check,
    /// (S·T)³ = exp(2πi·c/8)·S².
    pub st_cubed: Check,
}

impl RelationReport {
    pub fn all_pass(&self) -> bool {
        self.unitary.pass
            && self.symmetric.pass
            && self.s_squared_is_conjugation.pass
            && self.st_cubed.pass
    }
}

/// Materialize S and T in floating point and check the modular relations.
pub fn verify_modular_relations(
    m: &FiniteQuadraticModule,
    tol: f64,
    guards: &Guards,
) -> Result<RelationReport> {
    let data = modular_data(m, guards)?;
    let n = data.labels.len();
    let scale = 1.0 / (n as f64).sqrt();
    let to_c = |f: &FracMod1| -> Cplx {
        let p = f.as_phase();
        Cplx { re: p.re, im: p.im }
    };
    // The relations are checked on the modular-group representative S̄ (the
    // inverse of the exported matrix, which equals its entrywise conjugate
    // by symmetry and unitarity): with the +b sign the cube (ST)³ collapses
    // to a pure phase times the identity rather than times S². Unitarity,
    // symmetry, and S² = C are invariant under the conjugation.
    let s: Vec<Vec<Cplx>> = data
        .s_exponents
        .iter()
        .map(|row| {
            row.iter()
                .map(|e| {
                    let c = to_c(e);
                    Cplx {
                        re: scale * c.re,
                        im: -scale * c.im,
                    }
                })
                .collect()
        })
        .collect();
    let t: Vec<Cplx> = data.t_exponents.iter().map(to_c).collect();

    let matmul = |a: &Vec<Vec<Cplx>>, b: &Vec<Vec<Cplx>>| -> Vec<Vec<Cplx>> {
        let mut out = vec![vec![Cplx { re: 0.0, im: 0.0 }; n]; n];
        for i in 0..n {
            for k in 0..n {
                let aik = a[i][k];
                for j in 0..n {
                    let p = aik.mul(b[k][j]);
                    out[i][j].re += p.re;
                    out[i][j].im += p.im;
                }
            }
        }
        out
    };

    // unitarity: S·S̄ᵀ = 1
    let mut dev_unitary = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let mut acc = Cplx { re: 0.0, im: 0.0 };
            for k in 0..n {
                let conj = Cplx {
                    re: s[j][k].re,
                    im: -s[j][k].im,
                };
                let p = s[i][k].mul(conj);
                acc.re += p.re;
                acc.im += p.im;
            }
            let expect = if i == j { 1.0 } else { 0.0 };
            dev_unitary = dev_unitary.max(
                Cplx {
                    re: acc.re - expect,
                    im: acc.im,
                }
                .abs(),
            );
        }
    }

    // symmetry
    let mut dev_sym = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            dev_sym = dev_sym.max(
                Cplx {
                    re: s[i][j].re - s[j][i].re,
                    im: s[i][j].im - s[j][i].im,
                }
                .abs(),
            );
        }
    }

    // S² = C, the permutation u -> -u
    let s2 = matmul(&s, &s);
    let neg_index: Vec<usize> = data
        .labels
        .iter()
        .map(|u| {
            let nu = m.neg(u);
            data.labels
                .iter()
                .position(|w| *w == nu)
                .expect("negation stays in the label set")
        })
        .collect();
    let mut dev_s2 = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let expect = if neg_index[i] == j { 1.0 } else { 0.0 };
            dev_s2 = dev_s2.max(
                Cplx {
                    re: s2[i][j].re - expect,
                    im: s2[i][j].im,
                }
                .abs(),
            );
        }
    }

    // (S·T)³ = exp(2πi·c/8)·S²
    let st: Vec<Vec<Cplx>> = (0..n)
        .map(|i| (0..n).map(|j| s[i][j].mul(t[j])).collect())
        .collect();
    let st3 = matmul(&matmul(&st, &st), &st);
    let theta = 2.0 * std::f64::consts::PI * (data.central_charge as f64) / 8.0;
    let root = Cplx {
        re: theta.cos(),
        im: theta.sin(),
    };
    let mut dev_st3 = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let rhs = root.mul(s2[i][j]);
            dev_st3 = dev_st3.max(
                Cplx {
                    re: st3[i][j].re - rhs.re,
                    im: st3[i][j].im - rhs.im,
                }
                .abs(),
            );
        }
    }

    let check = |d: f64| Check {
        pass: d <= tol,
        max_deviation: d,
    };
    Ok(RelationReport {
        unitary: check(dev_unitary),
        symmetric: check(dev_sym),
        s_squared_is_conjugation: check(dev_s2),
        st_cubed: check(dev_st3),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocks::{block_to_fqm, BlockDescriptor};

    fn semion() -> FiniteQuadraticModule {
        block_to_fqm(&BlockDescriptor::ATwo { r: 1, a: 1 }).unwrap()
    }

    #[test]
    fn semion_modular_data() {
        let guards = Guards::default();
        let data = modular_data(&semion(), &guards).unwrap();
        assert_eq!(data.central_charge, 1);
        let f = |n: i64, d: i64| FracMod1::new(n, d).unwrap();
        assert_eq!(data.t_exponents, vec![f(0, 1), f(1, 4)]);
        // S = 2^{-1/2} [[1,1],[1,-1]]: exponents [[0,0],[0,1/2]]
        assert_eq!(
            data.s_exponents,
            vec![vec![f(0, 1), f(0, 1)], vec![f(0, 1), f(1, 2)]]
        );
    }

    #[test]
    fn trivial_module_data() {
        let guards = Guards::default();
        let data = modular_data(&FiniteQuadraticModule::trivial(), &guards).unwrap();
        assert_eq!(data.central_charge, 0);
        assert_eq!(data.labels.len(), 1);
        assert!(data.t_exponents[0].is_zero());
    }

    #[test]
    fn a3_central_charge() {
        let guards = Guards::default();
        let m = block_to_fqm(&BlockDescriptor::AOdd { p: 3, r: 1, a: 1 }).unwrap();
        assert_eq!(central_charge(&m, &guards).unwrap(), 2);
    }

    #[test]
    fn degenerate_rejected() {
        let guards = Guards::default();
        let deg = FiniteQuadraticModule::new(
            vec![BigUint::from(2u32)],
            vec![FracMod1::new(1, 2).unwrap()],
            vec![],
        )
        .unwrap();
        assert!(matches!(
            central_charge(&deg, &guards),
            Err(Error::DegenerateModule)
        ));
    }

    #[test]
    fn dims_and_fusion() {
        let m = block_to_fqm(&BlockDescriptor::AOdd { p: 3, r: 1, a: 1 }).unwrap();
        assert_eq!(state_space_dim(&m, 0), BigUint::from(1u32));
        assert_eq!(state_space_dim(&m, 2), BigUint::from(9u32));
        let s = semion();
        let g = s.generator(0);
        assert_eq!(fusion(&s, &g, &s.zero()), g);
        assert_eq!(fusion(&s, &g, &g), s.zero());
        let z4 = block_to_fqm(&BlockDescriptor::ATwo { r: 2, a: 1 }).unwrap();
        assert_eq!(
            fusion(&z4, &z4.element_i64(&[3]), &z4.element_i64(&[2])),
            z4.element_i64(&[1])
        );
    }

    #[test]
    fn relations_hold_for_small_modules() {
        let guards = Guards::default();
        for m in [
            FiniteQuadraticModule::trivial(),
            semion(),
            block_to_fqm(&BlockDescriptor::AOdd { p: 3, r: 1, a: 1 }).unwrap(),
            block_to_fqm(&BlockDescriptor::B { r: 2 }).unwrap(),
        ] {
            let rep = verify_modular_relations(&m, 1e-9, &guards).unwrap();
            assert!(rep.all_pass(), "relations failed: {rep:?}");
        }
        // trivial module deviates by exactly zero
        let rep = verify_modular_relations(&FiniteQuadraticModule::trivial(), 1e-9, &guards)
            .unwrap();
        assert_eq!(rep.unitary.max_deviation, 0.0);
    }

    #[test]
    fn first_s_row_is_constant() {
        let guards = Guards::default();
        let m = block_to_fqm(&BlockDescriptor::C { r: 2 }).unwrap();
        let data = modular_data(&m, &guards).unwrap();
        assert!(data.s_exponents[0].iter().all(|e| e.is_zero()));
        assert!(data.s_exponents.iter().all(|row| row[0].is_zero()));
    }
}
