use dipolefield::io::*;
use dipolefield::limit::{lorentzian_limit, Grid};
use dipolefield::montecarlo::{compare, run_simulation, CompareOptions, SimulationSpec};
use dipolefield::OrientationMode;

fn small_histogram() -> dipolefield::montecarlo::FieldHistogram {
    let spec = SimulationSpec::new(OrientationMode::Parallel, 0.0, 50, 3000, 17)
        .unwrap()
        .with_binning("-8:8:41".parse().unwrap())
        .unwrap();
    run_simulation(&spec, Some(1)).unwrap()
}

#[test]
fn curve_csv_and_json_round_trip_exactly() {
    let grid = Grid::new(-5.0, 5.0, 101).unwrap();
    let curve = lorentzian_limit(OrientationMode::Parallel, &grid).unwrap();
    assert_eq!(parse_curve(&curve_to_csv(&curve)).unwrap(), curve);
    assert_eq!(parse_curve(&to_json(&curve)).unwrap(), curve);
}

#[test]
fn histogram_csv_and_json_round_trip_exactly() {
    let h = small_histogram();
    assert_eq!(parse_histogram(&histogram_to_csv(&h)).unwrap(), h);
    assert_eq!(parse_histogram(&to_json(&h)).unwrap(), h);
}

#[test]
fn round_tripped_files_compare_identically() {
    let h = small_histogram();
    let curve = lorentzian_limit(OrientationMode::Parallel, &Grid::new(-9.0, 9.0, 361).unwrap()).unwrap();
    let direct = compare(&h, &curve, &CompareOptions::default()).unwrap();
    let h2 = parse_histogram(&histogram_to_csv(&h)).unwrap();
    let c2 = parse_curve(&curve_to_csv(&curve)).unwrap();
    assert_eq!(compare(&h2, &c2, &CompareOptions::default()).unwrap(), direct);
}

#[test]
fn schema_errors_name_the_column() {
    let err = parse_curve("g,dens\n0,1\n1,2\n").unwrap_err().to_string();
    assert!(err.contains("density"), "{err}");
    let err = parse_curve("g\n0\n1\n").unwrap_err().to_string();
    assert!(err.contains("density"), "{err}");
    let err = parse_curve("g,density\n0,1\n1,oops\n").unwrap_err().to_string();
    assert!(err.contains("'density'") && err.contains("row 2"), "{err}");

    let text = histogram_to_csv(&small_histogram());
    let broken = text.replace("bin_left,bin_right,count", "bin_left,bin_right,counts");
    let err = parse_histogram(&broken).unwrap_err().to_string();
    assert!(err.contains("count"), "{err}");
    let missing = text
        .lines()
        .filter(|l| !l.starts_with("# realizations"))
        .collect::<Vec<_>>()
        .join("\n");
    let err = parse_histogram(&missing).unwrap_err().to_string();
    assert!(err.contains("realizations"), "{err}");
}

#[test]
fn histogram_file_echoes_spec_and_seed() {
    let text = histogram_to_csv(&small_histogram());
    for key in ["# mode: parallel", "# seed: 17", "# n_dipoles: 50", "# realizations: 3000", "# bins: -8:8:41"] {
        assert!(text.contains(key), "missing {key}");
    }
    assert!(text.contains("\nbin_left,bin_right,count,normalized_height\n"));
}

#[test]
fn format_names() {
    assert_eq!("CSV".parse::<Format>().unwrap(), Format::Csv);
    assert_eq!("json".parse::<Format>().unwrap(), Format::Json);
    assert!("xml".parse::<Format>().is_err());
}
