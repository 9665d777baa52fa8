//! The whole proof pipeline, from a formula and a run (or a pairing) to a
//! checked derivation.

use std::fmt;

use thiserror::Error;

use super::{prove_literal_cirquent, run_first, DerivationError, DominationOracle, FirstRun};
use crate::analysis::{
    build_tree, find_total_resolution_with, opposite_pairs, AnalysisError, OppositionPairing,
    Resolution, SearchBudget,
};
use crate::cirquent::{check_proof, Derivation, Violation};
use crate::formula::Formula;
use crate::game::Run;
use crate::hyper::{
    build_hyperformula, counter_model, finitize, is_binary, Hyper, HyperError, Hypermodel,
    LiteralSource, ATOM_CAP,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Tree,
    Pairing,
    Image,
    Resolution,
    Finitize,
    Domination,
    Derivation,
    Endgame,
    Check,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Tree => "tree",
            Stage::Pairing => "pairing",
            Stage::Image => "image",
            Stage::Resolution => "resolution",
            Stage::Finitize => "finitize",
            Stage::Domination => "domination",
            Stage::Derivation => "derivation",
            Stage::Endgame => "endgame",
            Stage::Check => "check",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProveError {
    /// The image of the untrimmed tree is falsified by `counter_model`.
    #[error("not tautological: the image of the unit tree is falsifiable")]
    NotTautological { counter_model: Hypermodel },
    /// The untrimmed image is a tautology, yet no total resolution at this
    /// height passes the audit with a tautological image.
    #[error("no total resolution at this height yields an audited tautological image")]
    NoResolution,
    #[error("{stage}: {source}")]
    Analysis {
        stage: Stage,
        #[source]
        source: AnalysisError,
    },
    #[error("{stage}: {source}")]
    Hyper {
        stage: Stage,
        #[source]
        source: HyperError,
    },
    #[error("image: the trimmed image is not binary")]
    NotBinary,
    #[error("{stage}: {source}")]
    Derivation {
        stage: Stage,
        #[source]
        source: DerivationError,
    },
    #[error("check: {0}")]
    Rejected(Violation),
}

/// What the image is derived from before the first stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Finitization {
    /// The trimmed image itself.
    #[default]
    Keep,
    /// The trimmed image with redundant `⫯`-disjuncts pruned.
    Minimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProveOptions {
    pub height: usize,
    pub budget: SearchBudget,
    pub finitization: Finitization,
}

impl ProveOptions {
    pub fn new(height: usize) -> ProveOptions {
        ProveOptions {
            height,
            budget: SearchBudget::default(),
            finitization: Finitization::Keep,
        }
    }
}

/// Where opposite pairs and hyperliterals come from.
#[derive(Debug, Clone, Copy)]
pub enum ProveSource<'a> {
    Run(&'a Run),
    Pairing(&'a OppositionPairing),
}

#[derive(Debug, Clone)]
pub struct Proof {
    pub resolution: Resolution,
    /// The pairing restricted to the trimmed tree.
    pub pairing: OppositionPairing,
    /// The hyperformula the first part derives.
    pub image: Hyper,
    pub oracle: DominationOracle,
    pub first: FirstRun,
    /// From an axiom to the final cirquent of `first`.
    pub endgame: Derivation,
    /// From an axiom to the initial cirquent; accepted by the checker.
    pub derivation: Derivation,
}

fn analysis(stage: Stage) -> impl Fn(AnalysisError) -> ProveError {
    move |source| ProveError::Analysis { stage, source }
}

fn hyper(stage: Stage) -> impl Fn(HyperError) -> ProveError {
    move |source| ProveError::Hyper { stage, source }
}

fn derivation(stage: Stage) -> impl Fn(DerivationError) -> ProveError {
    move |source| ProveError::Derivation { stage, source }
}

/// Runs every stage and returns a proof only after the checker accepts it.
pub fn prove(f: &Formula, source: ProveSource<'_>, opts: ProveOptions) -> Result<Proof, ProveError> {
    let h = opts.height;
    let full = build_tree(f, h, &Resolution::new(), opts.budget.nodes).map_err(analysis(Stage::Tree))?;
    let pairing = match source {
        ProveSource::Run(run) => opposite_pairs(&full, run).map_err(analysis(Stage::Pairing))?,
        ProveSource::Pairing(p) => p.restrict(&full),
    };
    let literals = |p| match source {
        ProveSource::Run(run) => LiteralSource::Run(run),
        ProveSource::Pairing(_) => LiteralSource::Pairing(p),
    };
    let untrimmed = build_hyperformula(&full, literals(&pairing)).map_err(hyper(Stage::Image))?;
    if let Some(model) = counter_model(&untrimmed, ATOM_CAP).map_err(hyper(Stage::Image))? {
        return Err(ProveError::NotTautological { counter_model: model });
    }
    let (resolution, restricted) =
        find_total_resolution_with(f, h, &pairing, literals(&pairing), opts.budget)
            .map_err(analysis(Stage::Resolution))?
            .ok_or(ProveError::NoResolution)?;
    let t = build_tree(f, h, &resolution, opts.budget.nodes).map_err(analysis(Stage::Tree))?;
    let trimmed = build_hyperformula(&t, literals(&restricted)).map_err(hyper(Stage::Image))?;
    if !is_binary(&trimmed) {
        return Err(ProveError::NotBinary);
    }
    let image = match opts.finitization {
        Finitization::Keep => trimmed,
        Finitization::Minimize => finitize(&trimmed).map_err(hyper(Stage::Finitize))?,
    };
    let oracle = DominationOracle::new(&t, &restricted, &image).map_err(analysis(Stage::Domination))?;
    let first = run_first(f, &image, &oracle).map_err(derivation(Stage::Derivation))?;
    let images = first.last_images().resolve(&image);
    let endgame = prove_literal_cirquent(first.last(), &images).map_err(derivation(Stage::Endgame))?;
    let whole = first.derivation().stack_on(endgame.clone());
    check_proof(&whole, f).map_err(ProveError::Rejected)?;
    Ok(Proof {
        resolution,
        pairing: restricted,
        image,
        oracle,
        first,
        endgame,
        derivation: whole,
    })
}
