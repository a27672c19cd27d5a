//! Turns a [`SchemeSpec`] into a codebook bound to a constellation family.

use std::time::Duration;

use spm_core::codebook::{IndexCodebook, Variant};
use spm_core::combinatorics::{optimal_k, ordered_optimal_k};
use spm_core::constellations::{psk_family, qam_family};
use spm_core::selection::{
    brute_force_k_clique, clique_upper_bound, exact_max_clique, vertex_exclusion, CliqueResult, Graph,
};
use spm_core::{Family, Scheme};

use crate::config::{Config, ConfigError, ConstellationKind, KSpec, SchemeSpec, Selection, VariantName};
use crate::CliError;

pub struct BuiltScheme {
    pub scheme: Scheme,
    /// Pattern count before selection and padding.
    pub full_len: usize,
    pub selection: Option<CliqueResult>,
}

/// Variant of `spec` at `n` subcarriers, resolving `K = opt` and the DM
/// default `d = N / 2`.
pub fn resolve_variant(spec: &SchemeSpec, n: usize) -> Result<Variant, CliError> {
    let k = |opt: fn(usize) -> spm_core::Result<usize>| -> Result<usize, CliError> {
        match spec.k {
            Some(KSpec::Fixed(k)) => Ok(k),
            Some(KSpec::Optimal) => Ok(opt(n)?),
            None => Err(ConfigError::at(spec.line, format!("scheme '{}' needs K", spec.name)).into()),
        }
    };
    let variant = match spec.variant {
        VariantName::Ofdm => Variant::Ofdm,
        VariantName::Spm => Variant::Spm { k: k(|n| Ok(optimal_k(n)?.argmax))? },
        VariantName::Ospm => Variant::Ospm { k: k(ordered_optimal_k)? },
        VariantName::Fspm => Variant::Fspm,
        VariantName::Ofspm => Variant::Ofspm,
        VariantName::OfdmIm => Variant::OfdmIm { active: spec.active.unwrap_or(0) },
        VariantName::DmOfdmIm => Variant::DmOfdmIm { d: spec.d.unwrap_or(n / 2) },
        VariantName::MmOfdmIm => Variant::MmOfdmIm,
        VariantName::GdmOfdmIm => Variant::GdmOfdmIm,
    };
    variant.validate(n)?;
    Ok(variant)
}

pub fn scheme_n(spec: &SchemeSpec) -> Result<usize, CliError> {
    spec.n.ok_or_else(|| ConfigError::at(spec.line, format!("scheme '{}' has no N", spec.name)).into())
}

/// Constellation family with `count` members of order `spec.m`.
pub fn family(spec: &SchemeSpec, count: usize) -> Result<Family, CliError> {
    match spec.constellation {
        ConstellationKind::Psk => Ok(psk_family(spec.m, count, spec.rotation_slots.unwrap_or(count))?),
        ConstellationKind::Qam => {
            let levels = count.next_power_of_two().ilog2();
            if spec.qam_parent >> levels != spec.m {
                return Err(ConfigError::at(
                    spec.line,
                    format!(
                        "{} QAM cosets of order {} do not come from {}-QAM; set qam_parent = {}",
                        1usize << levels,
                        spec.m,
                        spec.qam_parent,
                        spec.m << levels
                    ),
                )
                .into());
            }
            Ok(qam_family(spec.qam_parent, levels)?.truncated(count)?)
        }
    }
}

/// Runs one clique algorithm on `graph`.
pub fn run_selection(
    graph: &Graph,
    algorithm: Selection,
    bound: Option<usize>,
    cfg: &Config,
) -> Result<CliqueResult, CliError> {
    let result = match algorithm {
        Selection::None => unreachable!("no selection requested"),
        Selection::Alg1 => {
            let bound = bound.unwrap_or_else(|| clique_upper_bound(graph));
            brute_force_k_clique(graph, bound, cfg.budget)?
        }
        Selection::Alg2 => vertex_exclusion(graph)?,
        Selection::Exact => exact_max_clique(graph, Duration::from_millis(cfg.exact_time_ms))?,
    };
    Ok(result)
}

pub fn build(spec: &SchemeSpec, cfg: &Config) -> Result<BuiltScheme, CliError> {
    let n = scheme_n(spec)?;
    let variant = resolve_variant(spec, n)?;
    let mut book = match &spec.patterns {
        Some(p) => IndexCodebook::from_patterns(variant, n, p.clone())?,
        None => IndexCodebook::build(variant, n)?,
    };
    let full_len = book.len();
    let mut selection = None;
    if spec.selection != Selection::None {
        let graph = Graph::hamming(book.patterns())?;
        let result = run_selection(&graph, spec.selection, None, cfg)?;
        log::info!("{}: {} selected {} of {} patterns", spec.name, result.algorithm.name(), result.size(), full_len);
        book = book.select(&result.selected)?;
        selection = Some(result);
    }
    if let Some(target) = spec.pad_to {
        book = book.padded(target)?;
    }
    let family = family(spec, book.num_constellations())?;
    let scheme = Scheme::new(book, family)?;
    Ok(BuiltScheme { scheme, full_len, selection })
}
