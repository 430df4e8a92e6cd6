use std::fmt::Write as _;
use std::time::Instant;

use treedict::clustering::ClusteringMethod;
use treedict::data::norm;
use treedict::dictionary::{extract_haar, extract_leaves, Dictionary, RepresentativePolicy};
use treedict::haar::{haar_analysis, haar_explicit, haar_reconstruction};
use treedict::imaging::{
    atom_mosaic_of, extract_grid_patches, extract_random_patches, load_pgm, psnr, reassemble,
    save_pgm, GrayImage,
};
use treedict::rng::SplitMix64;
use treedict::sparse::{encode_all, reconstruct as sparse_reconstruct, usage_stats};
use treedict::tree::{
    build_fifo, build_halving, build_priority, BuildConfig, PartitionTree, Strategy,
};
use treedict::{DataSet, Shape};

use crate::output::{require_file, OutputDir};
use crate::{
    CliError, ClusteringArg, HaarCheckArgs, ReconstructArgs, RepresentativeArg, StatsArgs,
    StrategyArg, TrainArgs,
};

fn clustering_method(arg: ClusteringArg, lloyd_iters: usize) -> ClusteringMethod {
    let mut method = match arg {
        ClusteringArg::TwoMeans => ClusteringMethod::two_means(),
        ClusteringArg::TwoMaxoids => ClusteringMethod::two_maxoids(),
        ClusteringArg::OneDFeature => ClusteringMethod::one_d_feature(),
        ClusteringArg::Spectral => ClusteringMethod::spectral(),
    };
    method.lloyd_iters = lloyd_iters;
    method
}

fn representative_policy(args: &TrainArgs) -> RepresentativePolicy {
    match args.representative {
        RepresentativeArg::Centroid => RepresentativePolicy::Centroid,
        RepresentativeArg::Maxoid => RepresentativePolicy::Maxoid,
        RepresentativeArg::RankR => RepresentativePolicy::RankR(args.rank),
        RepresentativeArg::DctM => RepresentativePolicy::DctMTerm(args.terms),
    }
}

fn load_training_data(args: &TrainArgs) -> Result<DataSet, CliError> {
    let ext = args
        .input
        .extension()
        .and_then(|e| e.to_str())
        .unwrap_or("")
        .to_ascii_lowercase();
    match ext.as_str() {
        "csv" => Ok(DataSet::load_csv(&args.input)?),
        "pgm" => {
            let image = load_pgm(&args.input)?;
            Ok(extract_random_patches(
                &image,
                args.patch_rows,
                args.patch_cols,
                args.num_patches,
                args.seed,
            )?)
        }
        other => Err(CliError::Usage(format!(
            "unsupported input extension '{}' (expected .csv or .pgm)",
            other
        ))),
    }
}

pub fn train(args: &TrainArgs) -> Result<(), CliError> {
    require_file(&args.input, "input")?;
    if args.mincard < 1 {
        return Err(CliError::Usage("--mincard must be at least 1".into()));
    }
    if args.lloyd_iters < 1 {
        return Err(CliError::Usage("--lloyd-iters must be at least 1".into()));
    }
    if let Some(k) = args.cardinality {
        if k < 2 {
            return Err(CliError::Usage("--cardinality must be at least 2".into()));
        }
    }

    let started = Instant::now();
    let data = load_training_data(args)?;
    let load_seconds = started.elapsed().as_secs_f64();

    let n_dim = data.shape().len();
    // Dictionary cardinality defaults to 50% more than the sample dimension.
    let cardinality = args.cardinality.unwrap_or_else(|| (3 * n_dim).div_ceil(2));
    let strategy = match args.strategy {
        StrategyArg::Fifo => Strategy::Fifo {
            epsilon: args.epsilon,
        },
        StrategyArg::Priority => Strategy::Priority { cardinality },
    };
    let cfg = BuildConfig {
        strategy,
        mincard: args.mincard,
        clustering: clustering_method(args.clustering, args.lloyd_iters),
        representative: representative_policy(args),
    };

    let build_start = Instant::now();
    let tree = match args.strategy {
        StrategyArg::Fifo => build_fifo(&data, &cfg)?,
        StrategyArg::Priority => build_priority(&data, &cfg)?,
    };
    let build_seconds = build_start.elapsed().as_secs_f64();

    let haar_start = Instant::now();
    let haar = extract_haar(&tree, &data, &cfg.representative)?;
    let haar_seconds = haar_start.elapsed().as_secs_f64();

    let leaves_start = Instant::now();
    let leaves = extract_leaves(&tree, &data, &cfg.representative)?;
    let leaves_seconds = leaves_start.elapsed().as_secs_f64();

    let out = OutputDir::create(&args.output_dir)?;
    out.echo_config(
        "train",
        args,
        serde_json::json!({
            "samples": data.len(),
            "sample_dimension": n_dim,
            "cardinality": cardinality,
            "haar_atoms": haar.len(),
            "leaves_atoms": leaves.len(),
        }),
    )?;
    out.write("tree.json", tree.to_json()?.as_bytes())?;
    out.write("dict_haar.json", haar.to_json()?.as_bytes())?;
    out.write("dict_leaves.json", leaves.to_json()?.as_bytes())?;
    haar.save_matrix_csv(&out.path("dict_haar.csv"))?;
    leaves.save_matrix_csv(&out.path("dict_leaves.csv"))?;

    let mut timing = String::from("phase,seconds,n,k\n");
    for (phase, seconds) in [
        ("load", load_seconds),
        ("build", build_seconds),
        ("extract_haar", haar_seconds),
        ("extract_leaves", leaves_seconds),
    ] {
        writeln!(
            timing,
            "{},{},{},{}",
            phase,
            seconds,
            data.len(),
            haar.len()
        )
        .unwrap();
    }
    out.write("timing.csv", timing.as_bytes())?;

    println!(
        "trained on {} samples: {} tree nodes, {} Haar atoms, {} leaves atoms",
        data.len(),
        tree.nodes().len(),
        haar.len(),
        leaves.len()
    );
    Ok(())
}

fn encode_image_grid(
    dict: &Dictionary,
    image: &GrayImage,
    sparsity: usize,
) -> Result<
    (
        DataSet,
        treedict::imaging::PatchGrid,
        treedict::sparse::SparseCode,
    ),
    CliError,
> {
    let (m1, m2) = dict
        .shape()
        .patch_dims()
        .ok_or_else(|| CliError::Runtime("dictionary atoms are not patch-shaped".into()))?;
    let (patches, grid) = extract_grid_patches(image, m1, m2)?;
    let code = encode_all(&patches, dict, sparsity, None)?;
    Ok((patches, grid, code))
}

pub fn reconstruct(args: &ReconstructArgs) -> Result<(), CliError> {
    require_file(&args.dict, "dictionary")?;
    require_file(&args.image, "image")?;
    if args.sparsity < 1 {
        return Err(CliError::Usage("--sparsity must be at least 1".into()));
    }
    let dict = Dictionary::load_json(&args.dict)?;
    let image = load_pgm(&args.image)?;
    let (_, grid, code) = encode_image_grid(&dict, &image, args.sparsity)?;
    let approx = sparse_reconstruct(&dict, &code)?;
    let rebuilt = reassemble(&approx, &grid, image.height(), image.width())?;
    let quality = psnr(&image, &rebuilt)?;

    let out = OutputDir::create(&args.output_dir)?;
    out.echo_config(
        "reconstruct",
        args,
        serde_json::json!({
            "dictionary_atoms": dict.len(),
            "patches": code.columns().len(),
            "psnr_db": quality.as_db(),
        }),
    )?;
    let tmp = out.path(".reconstructed.pgm.tmp");
    save_pgm(&rebuilt, &tmp)?;
    std::fs::rename(&tmp, out.path("reconstructed.pgm"))
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    code.save_csv(&out.path("code.csv"))?;

    let mut report = String::from("psnr_db,mean_residual,sparsity,dictionary_atoms,atoms_used\n");
    writeln!(
        report,
        "{},{},{},{},{}",
        quality,
        code.mean_residual(),
        args.sparsity,
        dict.len(),
        code.atoms_used()
    )
    .unwrap();
    out.write("report.csv", report.as_bytes())?;

    println!(
        "reconstructed {}x{} image, PSNR {} dB",
        image.height(),
        image.width(),
        quality
    );
    Ok(())
}

pub fn stats(args: &StatsArgs) -> Result<(), CliError> {
    require_file(&args.dict, "dictionary")?;
    require_file(&args.image, "image")?;
    if args.sparsity < 1 {
        return Err(CliError::Usage("--sparsity must be at least 1".into()));
    }
    if args.mosaic && (args.top < 1 || args.columns < 1) {
        return Err(CliError::Usage(
            "--top and --columns must be at least 1".into(),
        ));
    }
    let dict = Dictionary::load_json(&args.dict)?;
    let image = load_pgm(&args.image)?;
    let (_, _, code) = encode_image_grid(&dict, &image, args.sparsity)?;
    let stats = usage_stats(&code, &dict);

    let out = OutputDir::create(&args.output_dir)?;
    out.echo_config(
        "stats",
        args,
        serde_json::json!({
            "dictionary_atoms": dict.len(),
            "patches": code.columns().len(),
        }),
    )?;
    stats.save_csv(&out.path("eta.csv"))?;

    if args.mosaic {
        // Most-used atoms first; order breaks ties.
        let mut ranked: Vec<usize> = (0..dict.len()).collect();
        ranked.sort_by(|&a, &b| {
            stats.eta[b]
                .partial_cmp(&stats.eta[a])
                .unwrap()
                .then(a.cmp(&b))
        });
        let top: Vec<&treedict::dictionary::Atom> = ranked
            .iter()
            .take(args.top)
            .map(|&i| &dict.atoms()[i])
            .collect();
        let mosaic = atom_mosaic_of(&top, dict.shape(), args.columns)?;
        let tmp = out.path(".mosaic.pgm.tmp");
        save_pgm(&mosaic, &tmp)?;
        std::fs::rename(&tmp, out.path("mosaic.pgm"))
            .map_err(|e| CliError::Runtime(e.to_string()))?;
    }

    println!("eta written for {} atoms", dict.len());
    Ok(())
}

struct CheckReport {
    total: usize,
    failures: usize,
}

impl CheckReport {
    fn check(&mut self, name: &str, ok: bool, detail: &str) {
        self.total += 1;
        if ok {
            println!("PASS {}", name);
        } else {
            println!("FAIL {}: {}", name, detail);
            self.failures += 1;
        }
    }
}

/// Corrupts a tree's first leaf index set through the JSON surface, to
/// prove the validator catches structural damage.
fn corrupt_tree(tree: &PartitionTree) -> Result<PartitionTree, CliError> {
    let mut value: serde_json::Value =
        serde_json::from_str(&tree.to_json()?).map_err(|e| CliError::Runtime(e.to_string()))?;
    if let Some(nodes) = value["nodes"].as_array_mut() {
        for node in nodes.iter_mut() {
            if node["children"].is_null() {
                if let Some(indices) = node["indices"].as_array_mut() {
                    if !indices.is_empty() {
                        indices.remove(0);
                        break;
                    }
                }
            }
        }
    }
    Ok(PartitionTree::from_json(&value.to_string())?)
}

pub fn haar_check(args: &HaarCheckArgs) -> Result<(), CliError> {
    if args.levels > 16 {
        return Err(CliError::Usage("--levels must be at most 16".into()));
    }
    let levels = args.levels;
    let n = 1usize << levels;
    let mut rng = SplitMix64::new(args.seed);
    let signal: Vec<f64> = (0..n).map(|_| rng.next_gaussian() * 2.0).collect();
    let mut report = CheckReport {
        total: 0,
        failures: 0,
    };

    // Classical-transform properties.
    let coeffs = haar_analysis(&signal).map_err(CliError::from)?;
    let back = haar_reconstruction(&coeffs).map_err(CliError::from)?;
    let signal_norm = norm(&signal);
    let err: f64 = back
        .iter()
        .zip(&signal)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    report.check(
        "analysis-reconstruction",
        err <= 1e-12 * signal_norm.max(1.0),
        &format!("round-trip error {}", err),
    );
    let energy_drift = (coeffs.energy() - signal_norm * signal_norm).abs();
    report.check(
        "energy-preservation",
        energy_drift <= 1e-10 * (signal_norm * signal_norm).max(1.0),
        &format!("energy drift {}", energy_drift),
    );
    let mut explicit_ok = true;
    let mut explicit_detail = String::new();
    for co_level in 1..=levels {
        let j = levels - co_level;
        for k in 0..(1usize << j) {
            let (_, d) = haar_explicit(&signal, co_level, k).map_err(CliError::from)?;
            let gap = (d.unwrap() - coeffs.details[j][k]).abs();
            if gap > 1e-12 {
                explicit_ok = false;
                explicit_detail = format!("level {} position {} differs by {}", j, k, gap);
            }
        }
    }
    report.check("explicit-equals-recursive", explicit_ok, &explicit_detail);

    // Balanced-tree equivalence.
    let data = DataSet::from_rows(Shape::Flat(1), signal.iter().map(|&v| vec![v]).collect())
        .map_err(CliError::from)?;
    let tree = build_halving(&data).map_err(CliError::from)?;
    let tree = if args.inject_corruption {
        corrupt_tree(&tree)?
    } else {
        tree
    };
    let violations = tree.validate();
    report.check(
        "tree-invariants",
        violations.is_empty(),
        violations.first().map(String::as_str).unwrap_or(""),
    );
    if violations.is_empty() {
        let mut scaling_ok = true;
        let mut diff_ok = true;
        let mut detail = String::new();
        for node in tree.nodes() {
            let co_level = levels - node.level;
            let k = (node.indices[0] - 1) >> co_level;
            let (a, d) = haar_explicit(&signal, co_level, k).map_err(CliError::from)?;
            let expect = 2f64.powf(-(co_level as f64) / 2.0) * a;
            if (node.representative[0] - expect).abs() > 1e-12 {
                scaling_ok = false;
                detail = format!("node {} representative deviates", node.id);
            }
            if let Some((l, r)) = node.children {
                let diff = tree.node(l).map_err(CliError::from)?.representative[0]
                    - tree.node(r).map_err(CliError::from)?.representative[0];
                let expect =
                    2f64.powf(1.0 + (node.level as f64 - levels as f64) / 2.0) * d.unwrap();
                if (diff - expect).abs() > 1e-12 {
                    diff_ok = false;
                    detail = format!("node {} difference deviates", node.id);
                }
            }
        }
        report.check("representative-scaling", scaling_ok, &detail);
        report.check("difference-scaling", diff_ok, &detail);

        let haar =
            extract_haar(&tree, &data, &RepresentativePolicy::Centroid).map_err(CliError::from)?;
        let mut atoms_ok = true;
        for (event, atom) in tree.build_log().iter().zip(haar.atoms().iter().skip(1)) {
            let node = tree.node(event.node).map_err(CliError::from)?;
            let co_level = levels - node.level;
            let k = (node.indices[0] - 1) >> co_level;
            let (_, d) = haar_explicit(&signal, co_level, k).map_err(CliError::from)?;
            let d = d.unwrap();
            if d != 0.0 {
                let normalized = d / d.abs();
                let got = atom.values()[0];
                if (got - normalized).abs() > 1e-12 && (got + normalized).abs() > 1e-12 {
                    atoms_ok = false;
                }
            }
        }
        report.check("atoms-match-details", atoms_ok, "atom/detail mismatch");
    }

    if report.failures == 0 {
        println!(
            "haar-check passed ({} checks, levels = {})",
            report.total, levels
        );
        Ok(())
    } else {
        Err(CliError::Runtime(format!(
            "{} haar-check failures",
            report.failures
        )))
    }
}
