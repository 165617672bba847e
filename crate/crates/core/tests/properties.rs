use anticycle::cycles::{
    riemann_roch_chi, zariski_decompose, zariski_decompose_divisor, zariski_oracle, CycleConfig, Divisor,
};
use anticycle::fixtures::{generate_fixtures, named, random_walk};
use anticycle::qform::{self, DefinitenessKind, SymMatrix};
use anticycle::Rational;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn walk(seed: u64) -> CycleConfig {
    random_walk(&mut ChaCha8Rng::seed_from_u64(seed))
}

fn grid(dim: usize) -> Vec<Vec<i64>> {
    let r: i64 = if dim <= 4 { 2 } else { 1 };
    let mut out = vec![vec![]];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|v| {
                (-r..=r).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out.retain(|v| v.iter().any(|&x| x != 0));
    out
}

fn form(m: &SymMatrix, x: &[i64]) -> i64 {
    (0..m.dim())
        .map(|i| (0..m.dim()).map(|j| x[i] * m.get(i, j) * x[j]).sum::<i64>())
        .sum()
}

fn symmetric() -> impl Strategy<Value = SymMatrix> {
    (1usize..=6).prop_flat_map(|dim| {
        proptest::collection::vec(-4i64..=2, dim * dim).prop_map(move |raw| {
            SymMatrix::from_fn(dim, |i, j| {
                if i == j {
                    raw[i * dim + j] - 1
                } else {
                    raw[i * dim + j].abs() % 3
                }
            })
        })
    })
}

fn check_grid(m: &SymMatrix) -> Result<(), TestCaseError> {
    let kind = qform::classify::<Rational>(m);
    let values: Vec<i64> = grid(m.dim()).iter().map(|x| form(m, x)).collect();
    match kind {
        DefinitenessKind::NegativeDefinite => prop_assert!(values.iter().all(|&v| v < 0)),
        DefinitenessKind::NegativeSemidefinite => prop_assert!(values.iter().all(|&v| v <= 0)),
        DefinitenessKind::Other => {}
    }
    if values.iter().any(|&v| v > 0) {
        prop_assert_eq!(kind, DefinitenessKind::Other);
    }
    if values.contains(&0) {
        prop_assert_ne!(kind, DefinitenessKind::NegativeDefinite);
    }
    Ok(())
}

proptest! {
    #[test]
    fn definiteness_matches_grid_search(m in symmetric()) {
        check_grid(&m)?;
        prop_assert_eq!(qform::definiteness_by_minors(&m).unwrap(), qform::classify::<Rational>(&m));
    }

    #[test]
    fn cycle_matrices_match_grid_search(seed in any::<u64>()) {
        let c = walk(seed);
        prop_assume!(c.m() <= 6);
        check_grid(&c.intersection_matrix())?;
    }

    #[test]
    fn definiteness_is_permutation_invariant(m in symmetric(), seed in any::<u64>()) {
        let mut perm: Vec<usize> = (0..m.dim()).collect();
        let len = perm.len();
        perm.rotate_left((seed as usize) % len);
        if seed % 2 == 0 {
            perm.reverse();
        }
        let before = qform::definiteness::<Rational>(&m);
        let after = qform::definiteness::<Rational>(&m.permuted(&perm).unwrap());
        prop_assert_eq!(before.kind, after.kind);
        prop_assert_eq!(before.kernel_basis.len(), after.kernel_basis.len());
    }

    #[test]
    fn kernel_vectors_are_exact(m in symmetric()) {
        for v in qform::kernel::<Rational>(&m) {
            prop_assert!(m.apply(&v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn greedy_matches_oracle(seed in any::<u64>()) {
        let c = walk(seed);
        prop_assert_eq!(zariski_decompose::<Rational>(&c).unwrap(), zariski_oracle(&c).unwrap());
    }

    #[test]
    fn decomposition_scales(seed in any::<u64>()) {
        let c = walk(seed);
        let z = zariski_decompose::<Rational>(&c).unwrap();
        for s in [2i64, 3, 5] {
            let s = Rational::from_integer(BigInt::from(s));
            let scaled = zariski_decompose_divisor(&c, &Divisor::canonical(c.m()).scaled(&s)).unwrap();
            prop_assert_eq!(&scaled.p, &z.p.scaled(&s));
            prop_assert_eq!(&scaled.n_part, &z.n_part.scaled(&s));
        }
    }

    #[test]
    fn zero_degree_iff_orthogonal(seed in any::<u64>()) {
        let c = walk(seed);
        let z = zariski_decompose::<Rational>(&c).unwrap();
        prop_assert_eq!(z.d.is_zero(), z.p_dot.iter().all(|x| x.is_zero()));
    }

    #[test]
    fn positive_orthogonal_nef_part_spans_kernel(seed in any::<u64>()) {
        let c = walk(seed);
        let z = zariski_decompose::<Rational>(&c).unwrap();
        if z.p.coeffs().iter().all(|x| x.is_positive()) && z.p_dot.iter().all(|x| x.is_zero()) {
            let report = qform::definiteness::<Rational>(&c.intersection_matrix());
            prop_assert_eq!(report.kind, DefinitenessKind::NegativeSemidefinite);
            prop_assert_eq!(report.kernel_basis.len(), 1);
            let (_, l) = z.m0_coefficients().unwrap();
            let l: Vec<Rational> = l.into_iter().map(Rational::from_integer).collect();
            prop_assert_eq!(&report.kernel_basis[0], &l);
        }
    }
}

#[test]
fn rel1_identity_on_generated_corpus() {
    for g in generate_fixtures(4, 100) {
        let c = g.file.cycle_config().unwrap();
        let z = zariski_decompose::<Rational>(c).unwrap();
        if !z.is_degenerate_nef() {
            continue;
        }
        let (_, l) = z.m0_coefficients().unwrap();
        let m = c.m();
        for i in 0..m {
            let a = BigInt::from(-c.self_ints()[i]);
            let lhs = &l[(i + m - 1) % m] - &a * &l[i] + &l[(i + 1) % m];
            assert!(lhs.is_zero(), "{} at {i}", g.name);
        }
    }
}

#[test]
fn chi_identity_on_named_fixtures() {
    for c in [named::a(), named::c()] {
        let z = zariski_decompose::<Rational>(&c).unwrap();
        let (m0, _) = z.m0_coefficients().unwrap();
        for tau in 1..=5 {
            let s = Rational::from_integer(BigInt::from(tau) * &m0);
            let d = z.p.scaled(&s).sub(&Divisor::canonical(c.m()));
            assert_eq!(riemann_roch_chi(&c, &d).unwrap(), BigInt::from(1));
        }
    }
}
