use nereval::model::{Category, EntityType};
use nereval::perturb::{perturb_corpus, ErrorModel};
use nereval::report::{aggregate, evaluate_corpus, evaluate_document, Format, Layout, MetricReport, Scope, Strata};
use nereval::synth::{self, SynthConfig};
use nereval::{Corpus, SpatialCounts};
use proptest::prelude::*;

fn corpus_with_hypothesis(seed: u64, documents: usize) -> Corpus {
    let mut corpus = synth::corpus(&SynthConfig {
        documents,
        seed,
        ..SynthConfig::default()
    });
    let model = ErrorModel {
        miss_rate: 0.2,
        boundary_rate: 0.3,
        merge_rate: 0.1,
        spurious_rate: 1.0,
        seed,
        ..ErrorModel::default()
    };
    for set in perturb_corpus(&corpus, &model, "sys").unwrap().hypotheses.into_values() {
        corpus.add_hypothesis(set);
    }
    corpus
}

fn records(corpus: &Corpus) -> Vec<nereval::report::DocumentCounts> {
    corpus
        .documents
        .values()
        .map(|d| evaluate_document("sys", d, &corpus.gold[&d.id], &corpus.hypotheses["sys"][&d.id]).unwrap())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn aggregation_ignores_record_order(seed in any::<u64>(), shuffle in any::<u64>()) {
        let corpus = corpus_with_hypothesis(seed, 15);
        let mut recs = records(&corpus);
        let table = aggregate(&recs, Strata::ALL).unwrap();
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(shuffle);
        rand::seq::SliceRandom::shuffle(recs.as_mut_slice(), &mut rng);
        prop_assert_eq!(&table, &aggregate(&recs, Strata::ALL).unwrap());
    }

    #[test]
    fn overall_is_sum_of_categories(seed in any::<u64>()) {
        let corpus = corpus_with_hypothesis(seed, 20);
        let table = evaluate_corpus(&corpus, &["sys".to_string()], Strata::ALL, 2).unwrap();
        let overall = table.get("sys", Scope::Overall).unwrap();
        let by_cat: SpatialCounts = Category::ALL
            .iter()
            .map(|&c| table.get("sys", Scope::ByCategory(c)).unwrap().spatial)
            .sum();
        prop_assert_eq!(by_cat, overall.spatial);
        let typed_tp: u64 = EntityType::ALL
            .iter()
            .map(|&t| table.get("sys", Scope::ByType(t)).unwrap().typed.overall.tp)
            .sum();
        prop_assert_eq!(typed_tp, overall.typed.overall.tp);
    }
}

#[test]
fn thread_count_does_not_change_reports() {
    let corpus = corpus_with_hypothesis(11, 60);
    let render = |jobs| {
        let table = evaluate_corpus(&corpus, &["sys".to_string()], Strata::ALL, jobs).unwrap();
        let report = MetricReport::from_table(&table, 2);
        [Format::Csv, Format::Json, Format::Markdown]
            .map(|f| report.render(Layout::Spatial, f) + &report.render(Layout::Typical, f))
    };
    let one = render(1);
    for jobs in [2, 3, 8, 64] {
        assert_eq!(render(jobs), one);
    }
}

#[test]
fn duplicate_records_are_rejected() {
    let corpus = corpus_with_hypothesis(1, 3);
    let mut recs = records(&corpus);
    recs.push(recs[0].clone());
    assert!(aggregate(&recs, Strata::ALL).is_err());
}
