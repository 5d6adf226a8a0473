use clap::Args;
use sqg_core::inequality_lab::{
    check_ab_inequality, check_bilinear_ratio, check_coercivity, check_commutator_vanishing,
    check_gagliardo_equivalence, check_heat_decay, check_lq_semigroup_decay, check_max_point_bound, check_phase_bounds,
    check_sign_integral, check_spectral_mass_contraction, check_trilinear_bounds, counterexample_gamma2_q1, AbSetup,
    BilinearSetup, BlockSetup, CommutatorSetup, DecaySetup, Envelope, GagliardoSetup, InequalityReport, LemmaId,
    LineGrid, PhaseSetup, TrilinearRegime, TrilinearSetup,
};
use sqg_core::initial::PowerLaw;
use sqg_core::GridSpec;

use crate::failure::Failure;
use crate::output::Outputs;
use crate::Global;

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// One of the lemma ids listed by `sqg verify list`.
    pub lemma: String,
    /// Integrability exponent.
    #[arg(long)]
    pub q: Option<f64>,
    /// Exponents for lq_semigroup_decay, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub qs: Option<Vec<f64>>,
    /// Dyadic block index (first block for heat_decay).
    #[arg(long)]
    pub j: Option<i32>,
    /// Random samples per sweep point.
    #[arg(long)]
    pub samples: Option<u64>,
    /// Trilinear frequency arrangement: mixed, low_high, high_low, diagonal, localized.
    #[arg(long, default_value = "mixed")]
    pub regime: String,
    /// Frequency threshold of spectral_mass_contraction.
    #[arg(long, default_value_t = 4.0)]
    pub n0: f64,
    /// Mass fraction above n0 required by spectral_mass_contraction.
    #[arg(long, default_value_t = 0.5)]
    pub eps0: f64,
}

const DEFAULT_GAMMA: f64 = 0.5;
const DEFAULT_J: i32 = 3;
const DEFAULT_Q: f64 = 2.0;
const DEFAULT_QS: [f64; 4] = [1.5, 2.0, 3.0, 6.0];
const MASS_GRID: usize = 64;

fn known() -> String {
    LemmaId::ALL.iter().map(|l| l.as_str()).collect::<Vec<_>>().join(", ")
}

pub fn run_check(lemma: LemmaId, g: &Global, a: &VerifyArgs) -> Result<InequalityReport, Failure> {
    let seed = g.seed.unwrap_or(0);
    let gamma = g.gamma.unwrap_or(DEFAULT_GAMMA);
    let j = a.j.unwrap_or(DEFAULT_J);
    let q = a.q.unwrap_or(DEFAULT_Q);
    let block = || {
        let mut s = BlockSetup::new(j, gamma, 64, seed);
        if let Some(n) = a.samples {
            s.n_samples = n;
        }
        s
    };
    let decay = || {
        let mut s = DecaySetup::new(j, gamma, seed);
        if let Some(n) = a.samples {
            s.n_samples = n;
        }
        s
    };
    let report = match lemma {
        LemmaId::HeatDecay => check_heat_decay(&decay(), q)?,
        LemmaId::LqSemigroupDecay => {
            let qs = a.qs.clone().unwrap_or_else(|| DEFAULT_QS.to_vec());
            check_lq_semigroup_decay(&decay(), &qs)?
        }
        LemmaId::CoercivityQ => check_coercivity(&block(), q)?,
        LemmaId::SignIntegralQ1 => check_sign_integral(&block())?,
        LemmaId::MaxPointBound => check_max_point_bound(&block())?,
        LemmaId::GagliardoEquiv => {
            let mut s = GagliardoSetup::new(seed);
            if let Some(n) = a.samples {
                s.n_samples = n;
            }
            check_gagliardo_equivalence(&s)?
        }
        LemmaId::AbPointwise => {
            let n = a.samples.unwrap_or(10_000);
            let s = match a.q {
                Some(q) => AbSetup::single(q, n, seed),
                None => AbSetup::grid(n, seed),
            };
            check_ab_inequality(&s)?
        }
        LemmaId::SpectralMassContraction => {
            let grid = GridSpec::square(g.grid.unwrap_or(MASS_GRID))?;
            let field = PowerLaw::new(0.0, 1.0, f64::INFINITY).sample(grid, seed);
            let scale = a.n0.powf(gamma);
            let ts: Vec<f64> = (0..=40).map(|i| 0.05 * i as f64 / scale).collect();
            check_spectral_mass_contraction(&field, a.n0, a.eps0, gamma, &ts)?
        }
        LemmaId::PhaseLowerBound => check_phase_bounds(&PhaseSetup::new(gamma))?,
        LemmaId::CounterexampleGamma2 => counterexample_gamma2_q1(LineGrid::default(), Envelope::default())?,
        LemmaId::BilinearRatio => {
            let mut s = BilinearSetup::new(gamma, seed);
            if let Some(n) = a.samples {
                s.n_samples = n;
            }
            check_bilinear_ratio(&s)?
        }
        LemmaId::TrilinearBound => {
            let regime: TrilinearRegime = serde_json::from_value(serde_json::Value::String(a.regime.clone()))
                .map_err(|_| Failure::Usage(format!("unknown trilinear regime '{}'", a.regime)))?;
            let mut s = TrilinearSetup::new(gamma, regime, seed);
            if let Some(n) = a.samples {
                s.n_samples = n;
            }
            check_trilinear_bounds(&s)?
        }
        LemmaId::CommutatorVanishing => {
            let mut s = CommutatorSetup::new(seed)?;
            if let Some(n) = a.samples {
                s.n_pairs = n;
            }
            check_commutator_vanishing(&s)?
        }
    };
    Ok(report)
}

pub fn verify(g: &Global, a: &VerifyArgs) -> Result<(), Failure> {
    if a.lemma == "list" {
        for l in LemmaId::ALL {
            println!("{}", l.as_str());
        }
        return Ok(());
    }
    let lemma = LemmaId::parse(&a.lemma)
        .ok_or_else(|| Failure::Usage(format!("unknown lemma id '{}'; known ids: {}", a.lemma, known())))?;
    let config = serde_json::json!({
        "lemma": lemma.as_str(),
        "gamma": g.gamma,
        "grid": g.grid,
        "q": a.q,
        "qs": a.qs,
        "j": a.j,
        "samples": a.samples,
        "regime": a.regime,
        "n0": a.n0,
        "eps0": a.eps0,
    });
    let seed = g.seed.unwrap_or(0);
    let mut out = Outputs::create(
        &g.out_dir,
        &format!("verify_{}", lemma.as_str()),
        "verify",
        config,
        seed,
    )?;
    let t = std::time::Instant::now();
    let report = run_check(lemma, g, a)?;
    out.timing("check", t.elapsed().as_secs_f64());
    let json = report.to_json()?;
    out.write(&format!("{}.json", lemma.as_str()), json.as_bytes())?;
    if !report.sweep.is_empty() {
        out.write_with(&format!("{}_sweep.csv", lemma.as_str()), |b| report.write_sweep_csv(b))?;
    }
    let verdict = if report.passed() { "PASS" } else { "FAIL" };
    out.note(format!("verdict {verdict}"));
    out.finish()?;
    println!(
        "{} {verdict}: measured {:e}, bound {}",
        lemma.as_str(),
        report.measured_constant,
        serde_json::to_string(&report.theoretical_bound)?
    );
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Verdict(format!(
            "{} did not hold; see {}.json",
            lemma.as_str(),
            lemma.as_str()
        )))
    }
}
