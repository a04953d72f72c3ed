//! Property tests for the library invariants: Le Cam relations, product
//! composition, matrix positivity, the mixture identity against an
//! independent oracle, and universal validity of the bound reports on
//! randomized instances.

use bvbounds::bounds::{self, StatMoments};
use bvbounds::divergences::{divergence, DivergenceKind};
use bvbounds::infomatrices::{chi2_matrix, hellinger_affinity_matrix};
use bvbounds::models::{Family, FamilyParams, PolyStatistic};
use bvbounds::quad;
use bvbounds::special::norm_pdf;
use proptest::prelude::*;

fn unit_interval() -> impl Strategy<Value = f64> {
    0.05f64..0.95
}

fn positive_rate() -> impl Strategy<Value = f64> {
    0.3f64..3.0
}

fn le_cam_holds(tv: f64, h2: f64) -> bool {
    let h = h2.sqrt();
    h2 <= tv + 1e-9 && tv <= h * (2.0 - h2).sqrt() + 1e-9
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn le_cam_relations_gaussian(t0 in -2.0f64..2.0, t1 in -2.0f64..2.0, sigma in 0.5f64..2.0) {
        let fam = Family::IsoNormal { sigma };
        let p = FamilyParams::vector(vec![t0]);
        let q = FamilyParams::vector(vec![t1]);
        let tv = divergence(DivergenceKind::Tv, &fam, &p, &q).unwrap().value;
        let h2 = divergence(DivergenceKind::HellingerSq, &fam, &p, &q).unwrap().value;
        prop_assert!(le_cam_holds(tv, h2), "tv {} h2 {}", tv, h2);
        prop_assert!((0.0..=1.0).contains(&tv));
        prop_assert!((0.0..=1.0).contains(&h2));
    }

    #[test]
    fn le_cam_relations_bernoulli(a in unit_interval(), b in unit_interval(),
                                  c in unit_interval(), d in unit_interval()) {
        let fam = Family::BernoulliProduct;
        let p = FamilyParams::vector(vec![a, c]);
        let q = FamilyParams::vector(vec![b, d]);
        let tv = divergence(DivergenceKind::Tv, &fam, &p, &q).unwrap().value;
        let h2 = divergence(DivergenceKind::HellingerSq, &fam, &p, &q).unwrap().value;
        prop_assert!(le_cam_holds(tv, h2), "tv {} h2 {}", tv, h2);
    }

    #[test]
    fn le_cam_relations_poisson_and_exponential(a in positive_rate(), b in positive_rate()) {
        for fam in [Family::PoissonProduct, Family::ExponentialProduct] {
            let p = FamilyParams::vector(vec![a]);
            let q = FamilyParams::vector(vec![b]);
            let tv = divergence(DivergenceKind::Tv, &fam, &p, &q).unwrap().value;
            let h2 = divergence(DivergenceKind::HellingerSq, &fam, &p, &q).unwrap().value;
            prop_assert!(le_cam_holds(tv, h2), "{:?}: tv {} h2 {}", fam, tv, h2);
        }
    }

    #[test]
    fn symmetry_of_tv_and_hellinger(a in positive_rate(), b in positive_rate()) {
        let fam = Family::PoissonProduct;
        let p = FamilyParams::vector(vec![a]);
        let q = FamilyParams::vector(vec![b]);
        for kind in [DivergenceKind::Tv, DivergenceKind::HellingerSq] {
            let xy = divergence(kind, &fam, &p, &q).unwrap().value;
            let yx = divergence(kind, &fam, &q, &p).unwrap().value;
            prop_assert!((xy - yx).abs() < 1e-10);
        }
    }

    #[test]
    fn product_composition_multiplies(
        ps in prop::collection::vec((unit_interval(), unit_interval()), 1..5)
    ) {
        // χ²+1 and 1−H² multiply across coordinates
        let fam = Family::BernoulliProduct;
        let p = FamilyParams::vector(ps.iter().map(|x| x.0).collect());
        let q = FamilyParams::vector(ps.iter().map(|x| x.1).collect());
        let chi_joint = divergence(DivergenceKind::Chi2, &fam, &p, &q).unwrap().value;
        let h2_joint = divergence(DivergenceKind::HellingerSq, &fam, &p, &q).unwrap().value;
        let mut chi_prod = 1.0;
        let mut aff_prod = 1.0;
        for (a, b) in &ps {
            let pc = FamilyParams::vector(vec![*a]);
            let qc = FamilyParams::vector(vec![*b]);
            chi_prod *= 1.0 + divergence(DivergenceKind::Chi2, &fam, &pc, &qc).unwrap().value;
            aff_prod *= 1.0 - divergence(DivergenceKind::HellingerSq, &fam, &pc, &qc).unwrap().value;
        }
        prop_assert!((chi_joint - (chi_prod - 1.0)).abs() < 1e-12 * chi_prod.max(1.0));
        prop_assert!((h2_joint - (1.0 - aff_prod)).abs() < 1e-12);
    }

    #[test]
    fn chi2_matrices_are_psd(
        base in prop::collection::vec(-1.0f64..1.0, 2),
        shifts in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..5)
    ) {
        let fam = Family::IsoNormal { sigma: 1.0 };
        let mut params = vec![FamilyParams::vector(base.clone())];
        for (a, b) in &shifts {
            params.push(FamilyParams::vector(vec![base[0] + a, base[1] + b]));
        }
        let m = chi2_matrix(&fam, &params).unwrap();
        let lmax = m.spectral_norm().unwrap();
        prop_assert!(m.min_eigenvalue().unwrap() >= -1e-8 * lmax.max(1.0));
        let aff = hellinger_affinity_matrix(&fam, 0, &params).unwrap();
        let amax = aff.spectral_norm().unwrap();
        prop_assert!(aff.min_eigenvalue().unwrap() >= -1e-8 * amax.max(1.0));
        // spectral norm never exceeds the row sum norm
        prop_assert!(lmax <= m.row_sum_norm() + 1e-10 * lmax.max(1.0));
        // diagonal domination of the affinity diagonal
        for j in 0..m.m {
            prop_assert!(m.entry(j, j) >= aff.entry(j, j) - 1e-10);
        }
    }

    #[test]
    fn bernoulli_matrices_are_psd(
        base in prop::collection::vec(unit_interval(), 2),
        others in prop::collection::vec((unit_interval(), unit_interval()), 1..5)
    ) {
        let fam = Family::BernoulliProduct;
        let mut params = vec![FamilyParams::vector(base)];
        for (a, b) in &others {
            params.push(FamilyParams::vector(vec![*a, *b]));
        }
        let m = chi2_matrix(&fam, &params).unwrap();
        let lmax = m.spectral_norm().unwrap();
        prop_assert!(m.min_eigenvalue().unwrap() >= -1e-8 * lmax.max(1.0));
    }

    #[test]
    fn two_point_bounds_hold_universally(
        t0 in -1.5f64..1.5,
        dt in 0.01f64..2.0,
        b in -2.0f64..2.0,
        q in -1.0f64..1.0,
        c in -1.0f64..1.0,
    ) {
        // gaussian pair with a random degree-≤2 statistic
        let fam = Family::IsoNormal { sigma: 1.0 };
        let p = FamilyParams::vector(vec![t0]);
        let pq = FamilyParams::vector(vec![t0 + dt]);
        let stat = PolyStatistic { constant: c, linear: vec![b], quadratic: vec![q] };
        let div = bounds::pair_divergences(&fam, &p, &pq).unwrap();
        let moments = StatMoments::closed_form(
            vec![stat.mean(&fam, &p).unwrap(), stat.mean(&fam, &pq).unwrap()],
            vec![stat.variance(&fam, &p).unwrap(), stat.variance(&fam, &pq).unwrap()],
        ).unwrap();
        for rep in bounds::two_point_bounds(&div, &moments).unwrap() {
            prop_assert!(rep.holds, "{} slack {}", rep.id, rep.slack);
        }
    }
}

/// Independent oracle for the mixture identity: χ²(Σ v_j P_j, P₀) computed
/// from the mixture density directly (quadrature / exact sums), never through
/// the matrix code.
fn mixture_chi2_oracle(fam: &Family, base: &[f64], others: &[Vec<f64>], weights: &[f64]) -> f64 {
    match fam {
        Family::IsoNormal { sigma } => {
            let dens = |mu: f64, x: f64| norm_pdf((x - mu) / sigma) / sigma;
            let lo = base[0] - 14.0 * sigma - others.iter().map(|o| o[0].abs()).fold(0.0, f64::max);
            let hi = base[0] + 14.0 * sigma + others.iter().map(|o| o[0].abs()).fold(0.0, f64::max);
            let r = quad::integrate(
                |x| {
                    let p0 = dens(base[0], x);
                    let mix: f64 = weights
                        .iter()
                        .zip(others)
                        .map(|(w, o)| w * dens(o[0], x))
                        .sum();
                    (mix / p0 - 1.0).powi(2) * p0
                },
                lo,
                hi,
                1e-11,
                400_000,
            );
            r.value
        }
        Family::PoissonProduct => {
            let lmax = others.iter().map(|o| o[0]).fold(base[0], f64::max);
            let cutoff = (lmax + 40.0 * lmax.sqrt() + 60.0).ceil() as usize;
            let pmf = |l: f64, k: usize| {
                (k as f64 * l.ln() - l - statrs::function::gamma::ln_gamma(k as f64 + 1.0)).exp()
            };
            (0..=cutoff)
                .map(|k| {
                    let p0 = pmf(base[0], k);
                    let mix: f64 = weights
                        .iter()
                        .zip(others)
                        .map(|(w, o)| w * pmf(o[0], k))
                        .sum();
                    (mix / p0 - 1.0).powi(2) * p0
                })
                .sum()
        }
        Family::BernoulliProduct => {
            let mut acc = 0.0;
            for outcome in [0.0, 1.0] {
                let p0 = if outcome == 1.0 {
                    base[0]
                } else {
                    1.0 - base[0]
                };
                let mix: f64 = weights
                    .iter()
                    .zip(others)
                    .map(|(w, o)| w * if outcome == 1.0 { o[0] } else { 1.0 - o[0] })
                    .sum();
                acc += (mix / p0 - 1.0).powi(2) * p0;
            }
            acc
        }
        _ => unreachable!(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn mixture_identity_matches_oracle(
        base in 0.2f64..0.8,
        deltas in prop::collection::vec(-0.15f64..0.15, 2..5),
        raw_w in prop::collection::vec(0.05f64..1.0, 2..5),
    ) {
        // v nonnegative, summing to one, sized to the alternative count
        let m = deltas.len().min(raw_w.len());
        let deltas = &deltas[..m];
        let total: f64 = raw_w[..m].iter().sum();
        let weights: Vec<f64> = raw_w[..m].iter().map(|w| w / total).collect();

        for fam in [Family::IsoNormal { sigma: 1.0 }, Family::PoissonProduct, Family::BernoulliProduct] {
            let base_v = vec![base + 1.0 * matches!(fam, Family::PoissonProduct) as u64 as f64];
            let others: Vec<Vec<f64>> = deltas.iter().map(|d| vec![base_v[0] + d]).collect();
            let mut params = vec![FamilyParams::vector(base_v.clone())];
            for o in &others {
                params.push(FamilyParams::vector(o.clone()));
            }
            let mat = chi2_matrix(&fam, &params).unwrap();
            let quad_form = mat.quadratic_form(&weights).unwrap();
            let oracle = mixture_chi2_oracle(&fam, &base_v, &others, &weights);
            prop_assert!(
                (quad_form - oracle).abs() < 1e-6_f64.max(1e-8 * quad_form.abs()),
                "{:?}: vᵀΧv = {} oracle = {}",
                fam, quad_form, oracle
            );
        }
    }

    #[test]
    fn duplicated_parameters_are_singular(
        base in prop::collection::vec(-1.0f64..1.0, 2),
        shift in prop::collection::vec(-1.0f64..1.0, 2),
    ) {
        let fam = Family::IsoNormal { sigma: 1.0 };
        let alt = FamilyParams::vector(vec![base[0] + shift[0], base[1] + shift[1]]);
        let params = vec![FamilyParams::vector(base), alt.clone(), alt];
        let m = chi2_matrix(&fam, &params).unwrap();
        let lmax = m.spectral_norm().unwrap();
        prop_assert!(m.min_eigenvalue().unwrap() <= 1e-8 * lmax.max(1e-12));
    }
}

/// All five product families, ~100 random parameter sets each: every closed
/// form χ² matrix must be positive semi-definite up to 1e-8 of its scale.
#[test]
fn psd_across_all_families_500_sets() {
    use bvbounds::RngStream;
    use rand::Rng;
    let mut rng = RngStream::new(0xF5D).rng();
    for fam_ix in 0..5 {
        for _ in 0..100 {
            let d = rng.gen_range(1..=3usize);
            let m = rng.gen_range(1..=5usize);
            let (fam, params): (Family, Vec<FamilyParams>) = match fam_ix {
                0 => (
                    Family::IsoNormal {
                        sigma: rng.gen_range(0.5..2.0),
                    },
                    (0..=m)
                        .map(|_| {
                            FamilyParams::vector((0..d).map(|_| rng.gen_range(-1.5..1.5)).collect())
                        })
                        .collect(),
                ),
                1 => (
                    Family::PoissonProduct,
                    (0..=m)
                        .map(|_| {
                            FamilyParams::vector((0..d).map(|_| rng.gen_range(0.3..4.0)).collect())
                        })
                        .collect(),
                ),
                2 => (
                    Family::BernoulliProduct,
                    (0..=m)
                        .map(|_| {
                            FamilyParams::vector((0..d).map(|_| rng.gen_range(0.1..0.9)).collect())
                        })
                        .collect(),
                ),
                3 => {
                    let base: Vec<f64> = (0..d).map(|_| rng.gen_range(0.5..1.0)).collect();
                    let mut ps = vec![FamilyParams::vector(base.clone())];
                    for _ in 0..m {
                        ps.push(FamilyParams::vector(
                            base.iter().map(|b| b * rng.gen_range(0.6..2.5)).collect(),
                        ));
                    }
                    (Family::ExponentialProduct, ps)
                }
                _ => {
                    let shapes: Vec<f64> = (0..d).map(|_| rng.gen_range(0.5..3.0)).collect();
                    let base: Vec<f64> = (0..d).map(|_| rng.gen_range(0.5..1.0)).collect();
                    let mut ps = vec![FamilyParams::vector(base.clone())];
                    for _ in 0..m {
                        ps.push(FamilyParams::vector(
                            base.iter().map(|b| b * rng.gen_range(0.6..2.5)).collect(),
                        ));
                    }
                    (Family::GammaProduct { shapes }, ps)
                }
            };
            let mat = chi2_matrix(&fam, &params).unwrap();
            let lmax = mat.spectral_norm().unwrap();
            assert!(
                mat.min_eigenvalue().unwrap() >= -1e-8 * lmax.max(1.0),
                "{:?}: min eig {} at λmax {}",
                fam,
                mat.min_eigenvalue().unwrap(),
                lmax
            );
            let aff = hellinger_affinity_matrix(&fam, 0, &params).unwrap();
            let amax = aff.spectral_norm().unwrap();
            assert!(aff.min_eigenvalue().unwrap() >= -1e-8 * amax.max(1.0));
        }
    }
}

/// The matrix Fisher limit keeps at-least-linear error decay down to h = 1e-4.
#[test]
fn matrix_fisher_limit_down_to_1e4() {
    let sigma = 1.1f64;
    let fam = Family::IsoNormal { sigma };
    let theta0 = vec![0.2, -0.3];
    let err_at = |h: f64| -> f64 {
        let mut params = vec![FamilyParams::vector(theta0.clone())];
        for i in 0..2 {
            let mut t = theta0.clone();
            t[i] += h;
            params.push(FamilyParams::vector(t));
        }
        let chi = chi2_matrix(&fam, &params).unwrap();
        let mut worst = 0.0f64;
        for j in 0..2 {
            for k in 0..2 {
                let fisher = if j == k { 1.0 / (sigma * sigma) } else { 0.0 };
                worst = worst.max((chi.entry(j, k) / (h * h) - fisher).abs());
            }
        }
        worst
    };
    let errs: Vec<f64> = [1e-1, 1e-2, 1e-3, 1e-4]
        .iter()
        .map(|&h| err_at(h))
        .collect();
    for w in errs.windows(2) {
        // a decade of h must shrink the error by far more than the linear 0.1
        assert!(w[1] <= 0.6 * w[0], "errors {:?}", errs);
    }
}
