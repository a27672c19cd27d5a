//! One function per subcommand. Each returns CSV bodies without headers.

use std::fs;
use std::time::Instant;

use spm_core::analysis::{union_bound_ber, union_bound_ber_sampled, UnionBound, BOUND_CSV_HEADER, bound_csv_row};
use spm_core::codebook::{
    asymptotic_max_rate, asymptotic_rate, codebook_dmin, rate as rate_figures, rate_csv_row, IndexCodebook, Variant,
    RATE_CSV_HEADER,
};
use spm_core::scalar::format_sig;
use spm_core::selection::{clique_upper_bound, is_clique, select_csv_row, Algorithm, Graph, SELECT_CSV_HEADER};
use spm_core::simulation::{
    ber_csv_row, estimate_rate, noise_variance, rate_mc_csv_row, simulate_ber, RateConfig, SimConfig, BER_CSV_HEADER,
    RATE_MC_CSV_HEADER,
};
use spm_core::{Error, Scheme};

use crate::build::{build, resolve_variant, run_selection, scheme_n};
use crate::config::{Config, ConfigError, KSpec, SchemeSpec, Selection, VariantName};
use crate::{CliError, Doc, DocKind, Run};

/// Largest f for which exhaustive pair enumeration (distances, union bound)
/// is done.
pub const EXHAUSTIVE_PAIR_BITS: u32 = 14;

fn schemes(cfg: &Config) -> Result<&[SchemeSpec], CliError> {
    if cfg.schemes.is_empty() {
        return Err(ConfigError::general("no scheme configured (set variant and N)").into());
    }
    Ok(&cfg.schemes)
}

fn csv_doc(name: &str, body: String) -> Doc {
    Doc { scheme: Some(name.to_string()), kind: DocKind::Csv, body }
}

pub fn codebook(cfg: &Config) -> Result<Run, CliError> {
    let mut run = Run::default();
    for spec in schemes(cfg)? {
        let built = build(spec, cfg)?;
        let s = &built.scheme;
        let book = s.book();
        let m = s.family().order();
        let figures = s.rate()?;
        let (d_min, d_rank, rank) = if s.bits() <= EXHAUSTIVE_PAIR_BITS && s.num_codewords() > 1 {
            let d = codebook_dmin(&s.all_codewords())?;
            (format_sig(d.d_min, 6), format_sig(d.d_min_rank_limited, 6), d.min_rank.to_string())
        } else {
            Default::default()
        };
        let selection = built.selection.as_ref().map_or("none", |r| r.algorithm.name());
        let body = format!(
            "{RATE_CSV_HEADER},patterns,full_patterns,selection,d_min,d_min_rank_limited,min_rank\n{},{},{},{},{},{},{}\n",
            rate_csv_row(book.variant(), s.n(), m, &figures),
            book.len(),
            built.full_len,
            selection,
            d_min,
            d_rank,
            rank
        );
        run.docs.push(csv_doc(&spec.name, body));
        run.docs.push(Doc { scheme: Some(spec.name.clone()), kind: DocKind::Book, body: book.export_text(m) });
    }
    Ok(run)
}

fn select_rows(graph: &Graph, cfg: &Config, run: &mut Run) -> Result<String, CliError> {
    let t = Instant::now();
    let bound = clique_upper_bound(graph);
    log::info!("spectral bound {bound} on {} vertices in {:.1} s", graph.len(), t.elapsed().as_secs_f64());
    let mut body = format!("{SELECT_CSV_HEADER},valid,status\n");
    for &alg in &cfg.algorithms {
        let selection = match alg {
            Algorithm::BruteForce => Selection::Alg1,
            Algorithm::VertexExclusion => Selection::Alg2,
            Algorithm::Exact => Selection::Exact,
        };
        let t = Instant::now();
        match run_selection(graph, selection, Some(bound), cfg) {
            Ok(mut r) => {
                r.bound = Some(bound);
                let valid = is_clique(graph, &r.selected)?;
                let status = if r.proven_optimal || alg != Algorithm::Exact { "ok" } else { "timeout" };
                log::info!("{}: size {} ({status})", alg.name(), r.size());
                body.push_str(&format!("{},{valid},{status}\n", select_csv_row(&r)));
            }
            Err(CliError::Core(Error::BudgetExhausted { k, examined })) => {
                log::warn!("{}: budget exhausted at k = {k} after {examined} subsets", alg.name());
                run.budget_exhausted = true;
                body.push_str(&format!(
                    "{},,{bound},{:.3},,false,budget_exhausted\n",
                    alg.name(),
                    t.elapsed().as_secs_f64() * 1e3
                ));
            }
            Err(e) => return Err(e),
        }
    }
    Ok(body)
}

pub fn select(cfg: &Config) -> Result<Run, CliError> {
    let mut run = Run::default();
    if let Some(path) = &cfg.graph {
        let text = fs::read_to_string(path).map_err(|e| CliError::Io(path.clone(), e))?;
        let graph = Graph::parse_edge_list(&text, None)?;
        let body = select_rows(&graph, cfg, &mut run)?;
        run.docs.push(Doc { scheme: Some("graph".into()), kind: DocKind::Csv, body });
    }
    if cfg.graph.is_none() || !cfg.schemes.is_empty() {
        for spec in schemes(cfg)? {
            let n = scheme_n(spec)?;
            let variant = resolve_variant(spec, n)?;
            let book = match &spec.patterns {
                Some(p) => IndexCodebook::from_patterns(variant, n, p.clone())?,
                None => IndexCodebook::build(variant, n)?,
            };
            let graph = Graph::hamming(book.patterns())?;
            let body = select_rows(&graph, cfg, &mut run)?;
            run.docs.push(csv_doc(&spec.name, body));
        }
    }
    Ok(run)
}

/// Union bound at `snr_db`; exhaustive for f <= [`EXHAUSTIVE_PAIR_BITS`],
/// sampled otherwise.
pub fn scheme_bound(
    scheme: &Scheme,
    codewords: &[Vec<spm_core::Complex64>],
    snr_db: f64,
    cfg: &Config,
) -> Result<UnionBound, CliError> {
    let labels: Vec<u64> = (0..codewords.len() as u64).collect();
    let es_n0 = 1.0 / noise_variance(snr_db);
    let f = scheme.bits();
    Ok(if f <= EXHAUSTIVE_PAIR_BITS {
        union_bound_ber(codewords, &labels, f, es_n0)?
    } else {
        union_bound_ber_sampled(codewords, &labels, f, es_n0, cfg.bound_samples, cfg.seed)?
    })
}

pub fn ber(cfg: &Config) -> Result<Run, CliError> {
    let mut run = Run::default();
    for spec in schemes(cfg)? {
        let built = build(spec, cfg)?;
        let s = &built.scheme;
        let sim = SimConfig {
            snr_db: cfg.snr_db.clone(),
            min_bit_errors: cfg.min_errors,
            max_blocks: cfg.max_blocks,
            seed: cfg.seed,
            ..SimConfig::default()
        };
        let t = Instant::now();
        let report = simulate_ber(s, &sim)?;
        log::info!("{}: {} SNR points in {:.1} s", spec.name, report.points.len(), t.elapsed().as_secs_f64());
        if !report.all_converged() {
            log::warn!("{}: some SNR points stopped at max_blocks before min_errors", spec.name);
            run.non_converged = true;
        }
        let codewords = if cfg.bound { s.all_codewords() } else { Vec::new() };
        let mut body = String::from(BER_CSV_HEADER);
        if cfg.bound {
            body.push_str(",bound_ber");
        }
        body.push('\n');
        for p in &report.points {
            body.push_str(&ber_csv_row(p));
            if cfg.bound {
                let b = scheme_bound(s, &codewords, p.snr_db, cfg)?;
                body.push_str(&format!(",{}", format_sig(b.ber, 9)));
            }
            body.push('\n');
        }
        run.docs.push(csv_doc(&spec.name, body));
    }
    Ok(run)
}

pub fn bound(cfg: &Config) -> Result<Run, CliError> {
    let mut run = Run::default();
    for spec in schemes(cfg)? {
        let built = build(spec, cfg)?;
        let s = &built.scheme;
        let codewords = s.all_codewords();
        let mut body = format!("{BOUND_CSV_HEADER}\n");
        for &snr in &cfg.snr_db {
            let b = scheme_bound(s, &codewords, snr, cfg)?;
            body.push_str(&bound_csv_row(snr, &b));
            body.push('\n');
        }
        run.docs.push(csv_doc(&spec.name, body));
    }
    Ok(run)
}

fn asymptote(spec: &SchemeSpec, variant: Variant, n: usize) -> Option<f64> {
    match (spec.variant, spec.k) {
        (VariantName::Spm | VariantName::Ospm, Some(KSpec::Fixed(k))) => Some(asymptotic_rate(k, spec.m)),
        (VariantName::Spm | VariantName::Ospm | VariantName::Fspm | VariantName::Ofspm, _) if n >= 2 => {
            asymptotic_max_rate(variant, n, spec.m).ok()
        }
        _ => None,
    }
}

/// Exact rate table over `n_min..=n_max` from pattern counts alone; no
/// selection is applied. Rows where the variant is undefined (e.g. K > N)
/// are skipped.
pub fn rate(cfg: &Config) -> Result<Run, CliError> {
    let mut run = Run::default();
    for spec in schemes(cfg)? {
        let mut body = format!("{RATE_CSV_HEADER},raw_index_rate,asymptote\n");
        for n in cfg.n_min..=cfg.n_max {
            let variant = match resolve_variant(spec, n) {
                Ok(v) => v,
                Err(CliError::Core(Error::Parameter(msg))) => {
                    log::info!("{}: skipping N = {n}: {msg}", spec.name);
                    continue;
                }
                Err(e) => return Err(e),
            };
            let r = rate_figures(variant, n, spec.m, None)?;
            let asym = asymptote(spec, variant, n).map_or(String::new(), |a| format_sig(a, 9));
            body.push_str(&format!(
                "{},{},{}\n",
                rate_csv_row(variant, n, spec.m, &r),
                format_sig(r.raw_index_rate, 9),
                asym
            ));
        }
        run.docs.push(csv_doc(&spec.name, body));
    }
    Ok(run)
}

pub fn rate_mc(cfg: &Config) -> Result<Run, CliError> {
    let mut run = Run::default();
    for spec in schemes(cfg)? {
        let built = build(spec, cfg)?;
        let rc = RateConfig { snr_db: cfg.snr_db.clone(), draws: cfg.draws, seed: cfg.seed };
        let t = Instant::now();
        let points = estimate_rate(&built.scheme, &rc)?;
        log::info!("{}: rate curve in {:.1} s", spec.name, t.elapsed().as_secs_f64());
        let mut body = format!("{RATE_MC_CSV_HEADER}\n");
        for p in &points {
            body.push_str(&rate_mc_csv_row(p));
            body.push('\n');
        }
        run.docs.push(csv_doc(&spec.name, body));
    }
    Ok(run)
}
