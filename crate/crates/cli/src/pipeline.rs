//! Order → classes → eigenform → theta table → periods, with caching.

use log::info;
use toric_core::hecke::{eigenforms, subspace, Eigenform, SubspaceKind};
use toric_core::ideals::{enumerate_classes, ClassSet};
use toric_core::quat::{
    algebra_of_discriminant, eichler_order, maximal_order, reference_order, QuaternionAlgebra, QuaternionOrder,
};
use toric_core::stats::PeriodDataset;
use toric_core::theta::{period_dataset, PeriodRecord, ThetaTable, WaldspurgerSeries};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::io::{fingerprint, Cache};

/// The order of the run: the shipped reference basis when there is one,
/// otherwise a computed maximal order, cut down to the requested level.
pub fn order(cfg: &RunConfig) -> CliResult<QuaternionOrder> {
    if !QuaternionAlgebra::is_valid_discriminant(cfg.disc_d) {
        return Err(CliError::domain(format!(
            "discriminant {} must be odd, square-free, with an odd number of prime factors",
            cfg.disc_d
        )));
    }
    let omax = match reference_order(cfg.disc_d) {
        Some(o) => o,
        None => maximal_order(&algebra_of_discriminant(cfg.disc_d)?)?,
    };
    Ok(eichler_order(&omax, cfg.level)?)
}

pub fn cache(cfg: &RunConfig) -> Cache {
    Cache { dir: cfg.cache_dir.clone(), disc_d: cfg.disc_d, level: cfg.level }
}

pub fn classes(cfg: &RunConfig) -> CliResult<ClassSet> {
    let cache = cache(cfg);
    if let Some(cs) = cache.load_classes()? {
        info!("classes: loaded {} from cache", cache.classes_path().display());
        return Ok(cs);
    }
    let o = order(cfg)?;
    info!("classes: enumerating for discriminant {} level {}", cfg.disc_d, cfg.level);
    let cs = enumerate_classes(&o)?;
    cache.store_classes(&cs)?;
    Ok(cs)
}

/// One representative per Galois orbit of normalized eigenforms in the
/// new, Atkin–Lehner invariant cusp space.
pub fn eigenform_orbits(cs: &ClassSet) -> CliResult<Vec<Eigenform>> {
    let sub = subspace(cs, SubspaceKind::NewNInvariantCuspidal)?;
    Ok(eigenforms(&sub, cs)?)
}

pub fn eigenform(cfg: &RunConfig, cs: &ClassSet) -> CliResult<Eigenform> {
    let mut all = eigenform_orbits(cs)?;
    if cfg.form >= all.len() {
        return Err(CliError::domain(format!(
            "form {} requested but the space has {} Galois orbits",
            cfg.form,
            all.len()
        )));
    }
    Ok(all.swap_remove(cfg.form))
}

pub fn theta(cfg: &RunConfig, cs: &ClassSet) -> CliResult<ThetaTable> {
    let cache = cache(cfg);
    let fp = fingerprint(cs)?;
    if let Some(t) = cache.load_theta(&fp, cfg.bound)? {
        info!("theta: loaded table to {} from cache", t.bound);
        return Ok(t);
    }
    info!("theta: counting Gross lattice vectors to {}", cfg.bound);
    let t = ThetaTable::compute(cs, cfg.bound);
    cache.store_theta(&fp, &t)?;
    Ok(t)
}

/// Everything a periods run produces.
pub struct PeriodRun {
    pub classes: ClassSet,
    pub eigenform: Eigenform,
    pub series: WaldspurgerSeries,
    pub records: Vec<PeriodRecord>,
}

impl PeriodRun {
    pub fn dataset(&self) -> CliResult<PeriodDataset> {
        Ok(PeriodDataset::from_records(&self.records, self.eigenform.field.clone())?)
    }
}

/// Periods for all fundamental `−bound < Δ < 0`.
pub fn periods(cfg: &RunConfig) -> CliResult<PeriodRun> {
    let cs = classes(cfg)?;
    let phi = eigenform(cfg, &cs)?;
    let table = theta(cfg, &cs)?;
    info!("periods: Waldspurger coefficients to {}", cfg.bound);
    let series = WaldspurgerSeries::compute(&phi, &cs, &table, cfg.bound)?;
    let records = period_dataset(&series, &cs, cfg.bound)?;
    info!("periods: {} fields, {} in Y", records.len(), records.iter().filter(|r| r.in_y).count());
    Ok(PeriodRun { classes: cs, eigenform: phi, series, records })
}
