use pade_pencil::experiments::{
    approximate, geometric_sample, run_geometric_noise, run_log_branch, ExperimentConfig, GeometricNoiseReport, Method,
};
use pade_pencil::series::{gen_from_poles, gen_log_series};
use pade_pencil::{Complex64, Conformation, FilterParams, PowerSeries};

fn small_config(method: Method) -> ExperimentConfig {
    ExperimentConfig {
        eps_list: vec![1e-3, 1e-8],
        samples: 3,
        seed: 7,
        method,
        ..ExperimentConfig::default()
    }
}

#[test]
fn geometric_noise_is_deterministic() {
    let cfg = small_config(Method::Pm2);
    let a = run_geometric_noise(&cfg).unwrap();
    let b = run_geometric_noise(&cfg).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.rows.len(), 6);
    assert_eq!(a.to_csv().lines().count(), 7);
}

#[test]
fn seeds_change_the_draws() {
    let a = run_geometric_noise(&small_config(Method::Pm2)).unwrap();
    let b = run_geometric_noise(&ExperimentConfig { seed: 8, ..small_config(Method::Pm2) }).unwrap();
    assert_ne!(a.rows, b.rows);
}

#[test]
fn appending_samples_keeps_earlier_ones() {
    let short = small_config(Method::Dm);
    let long = ExperimentConfig { samples: 5, ..short.clone() };
    for j in 0..3 {
        let a = geometric_sample(&short, 1, j).unwrap();
        let b = geometric_sample(&long, 1, j).unwrap();
        assert_eq!(a.row, b.row);
    }
}

#[test]
fn report_survives_json() {
    let report = run_geometric_noise(&small_config(Method::Pm1)).unwrap();
    let text = serde_json::to_string(&report).unwrap();
    let back: GeometricNoiseReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back.rows.len(), report.rows.len());
    assert_eq!(back.config, report.config);
}

#[test]
fn pm2_cleans_every_noise_level() {
    let report = run_geometric_noise(&small_config(Method::Pm2)).unwrap();
    for row in &report.rows {
        assert_eq!(row.n_poles, Some(1), "{row:?}");
        assert!(row.system_pole_error.unwrap() < 100.0 * row.eps);
    }
}

#[test]
fn all_methods_agree_on_exact_rational_data() {
    let poles = [Complex64::new(1.5, 0.5), Complex64::new(1.5, -0.5), Complex64::new(-2.0, 0.0)];
    let weights = [Complex64::new(1.0, 1.0), Complex64::new(1.0, -1.0), Complex64::new(0.5, 0.0)];
    let s = gen_from_poles(&poles, &weights, 6).unwrap();
    let conf = Conformation::new(3, -1).unwrap();
    let z = Complex64::new(0.3, -0.2);
    let exact: Complex64 = poles.iter().zip(&weights).map(|(p, e)| e / (1.0 - z / p)).sum();
    for method in [Method::Dm, Method::Svd, Method::Pm1, Method::Pm2] {
        let a = approximate(&s, &conf, method, &FilterParams::default()).unwrap();
        assert_eq!(a.poles.len(), 3, "{method}");
        let v = pade_pencil::Evaluate::eval(&a, z).unwrap();
        assert!((v - exact).norm() < 1e-10, "{method}: {v} vs {exact}");
    }
}

#[test]
fn log_branch_report_shape() {
    let cfg = ExperimentConfig {
        n: 21,
        mesh_spacing: 0.1,
        ..ExperimentConfig::log_branch()
    };
    let r = run_log_branch(&cfg).unwrap();
    assert_eq!(r.mesh_points, pade_pencil::unit_disk_mesh(0.1).len());
    assert!(r.dm.error.is_none() && r.pm2.error.is_none());
    assert_eq!(r.pm2.off_ray_poles, 0);
    assert!(r.pm2.mesh_max_error.unwrap() < 1e-5);
    assert_eq!(r.assimilation.n, 20);
    assert!(r.to_csv().starts_with("method,kind,re,im\n"));
}

#[test]
fn declared_digits_drive_the_default_filter() {
    let s: PowerSeries = gen_log_series(21).unwrap().with_digits(6.0).unwrap();
    assert_eq!(FilterParams::for_series(&s).t, 6.0);
    let coarse = approximate(&s, &Conformation::new(10, 0).unwrap(), Method::Pm2, &FilterParams::for_series(&s)).unwrap();
    let fine = approximate(&s, &Conformation::new(10, 0).unwrap(), Method::Pm2, &FilterParams::default()).unwrap();
    assert!(coarse.final_l < fine.final_l);
}
