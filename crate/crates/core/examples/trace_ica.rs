// debug: trace lim behavior on a stalling fixture member
use brpd::preprocess::{fit_fastica, IcaSettings, ArtifactAnnotations};
use brpd::synth::{default_fixture_spec, generate_cohort};

fn main() {
    let mut spec = default_fixture_spec();
    spec.n_subjects = 5;
    let members = generate_cohort(&spec).unwrap();
    // member index 4 stalled (s02_T2 in the 5-subject run)
    for idx in [4usize, 6, 7] {
        let rec = &members[idx].recording;
        let t0 = std::time::Instant::now();
        let model = fit_fastica(rec, &ArtifactAnnotations::default(), &IcaSettings { max_iter: 3000, ..IcaSettings::new(8) }).unwrap();
        println!("{}: converged={} iters={} in {:?}", members[idx].source_id, model.converged, model.iterations_used, t0.elapsed());
    }
}
