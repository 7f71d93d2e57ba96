use anyhow::Result;
use serde_json::json;
use umda_core::levels::{
    level_sequence, max_spacing, preset_leadingones, preset_onemax_large, preset_onemax_small,
    LevelScheme, DEFAULT_PSI,
};

use crate::{BoundArgs, LevelsArgs, Preset};

pub fn bound(args: &BoundArgs) -> Result<u8> {
    let psi = args.psi.unwrap_or(DEFAULT_PSI);
    let partition = match args.preset {
        Preset::Leadingones => preset_leadingones(args.n, args.mu, args.lambda)?,
        Preset::OnemaxSmall => preset_onemax_small(args.n, args.mu, args.lambda, args.c, args.a)?,
        Preset::OnemaxLarge => preset_onemax_large(
            args.n,
            args.mu,
            args.lambda,
            args.d.unwrap_or_else(|| max_spacing(psi)),
            args.kappa.unwrap_or(psi),
            psi,
            args.large_c,
        )?,
    };
    let lambda = args.lambda as f64;
    let g3 = partition.g3_min_population();
    let evaluations = partition.level_based_bound(lambda);
    let below_g3 = lambda < g3;

    for note in &partition.advisories {
        eprintln!("{note}");
    }
    if below_g3 {
        eprintln!(
            "warning: lambda = {} is below the population-size threshold {g3:.4}; the value is not a valid bound",
            args.lambda
        );
    }
    if args.json {
        let spacing = match &partition.scheme {
            LevelScheme::OneMaxSpaced { thresholds } => Some(thresholds.len() - 1),
            _ => None,
        };
        let report = json!({
            "preset": partition.label,
            "n": args.n,
            "mu": args.mu,
            "lambda": args.lambda,
            "delta": partition.delta,
            "gamma0": partition.gamma0,
            "m": partition.m,
            "z_star": partition.z_star(),
            "g3_threshold": g3,
            "satisfies_g3": !below_g3,
            "bound_evaluations": evaluations,
            "bound_generations": evaluations / lambda,
            "ell": spacing,
            "advisories": partition.advisories,
        });
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        println!("preset            {}", partition.label);
        println!("delta             {}", partition.delta);
        println!("gamma0            {}", partition.gamma0);
        println!("m                 {}", partition.m);
        println!("z_star            {:e}", partition.z_star());
        println!("g3 threshold      {g3:.6}");
        println!("bound (evals)     {evaluations:.6}");
        println!("bound (gens)      {:.6}", evaluations / lambda);
    }
    Ok(0)
}

pub fn levels(args: &LevelsArgs) -> Result<u8> {
    let seq = level_sequence(args.n, args.d)?;
    let (lo, hi) = seq.ell_bounds();
    if args.json {
        println!("{}", serde_json::to_string_pretty(&seq)?);
    } else {
        println!("n = {}, d = {}, ell = {} in ({lo:.4}, {hi:.4})", seq.n, seq.d, seq.ell);
        let f: Vec<String> = seq.f.iter().map(usize::to_string).collect();
        println!("{}", f.join(" "));
    }
    Ok(0)
}
