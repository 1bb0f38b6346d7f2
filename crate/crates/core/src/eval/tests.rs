use super::*;
use crate::corpus::LanguageProfile;
use crate::pipeline::IndexOptions;

fn doc(id: &str, label: &str, source: &str) -> CodeDocument {
    CodeDocument::from_source(id, label, source, &LanguageProfile::java())
}

/// Each label has its own words in comments and a shared `{ x(); }` snippet
/// so the feature filter keeps something.
fn separable_corpus() -> (CorpusIndex, Vec<Query>) {
    let topics = [
        ("net", "socket packet port"),
        ("gui", "button window click"),
        ("db", "table query index"),
        ("io", "stream buffer read"),
        ("log", "logger level append"),
    ];
    let mut docs = Vec::new();
    let mut queries = Vec::new();
    for (t, words) in topics {
        for d in 0..2 {
            let src = format!("// {words}\nclass C{d} {{ void run() {{ if (ok) {{ shared(); }} }} }}");
            docs.push(doc(&format!("{t}{d}.java"), t, &src));
        }
        for qi in 0..2 {
            queries.push(Query::new(format!("{t}-{qi}"), words, Some(t.to_string())).unwrap());
        }
    }
    let options = IndexOptions {
        snippet_bounds: Some((1, 100)),
        ..IndexOptions::default()
    };
    (
        CorpusIndex::build(docs, &LanguageProfile::java(), &options).unwrap(),
        queries,
    )
}

fn small_config(methods: Vec<Method>) -> EvalConfig {
    EvalConfig {
        methods,
        hyper: Hyperparams {
            k: 2,
            max_iter: 20,
            ..Hyperparams::default()
        },
        lsi_k: Some(1),
        ..EvalConfig::default()
    }
}

#[test]
fn folds_are_balanced_and_seeded() {
    let ids: Vec<String> = (0..10).map(|i| format!("q{i}")).collect();
    let folds = assign_folds(&ids, 5, 7);
    assert!(folds.iter().all(|f| f.len() == 2));
    assert_eq!(folds, assign_folds(&ids, 5, 7));
    let mut reversed = ids.clone();
    reversed.reverse();
    assert_eq!(folds, assign_folds(&reversed, 5, 7));
    let uneven = assign_folds(&ids[..7], 5, 1);
    let sizes: Vec<usize> = uneven.iter().map(Vec::len).collect();
    assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
}

#[test]
fn training_free_method_equals_direct_evaluation() {
    let (index, queries) = separable_corpus();
    let config = small_config(vec![Method::Cos]);
    let report = cross_validate(&index, &queries, &config).unwrap();
    let judgments = RelevanceJudgments::from_labels(&queries, &index.documents).unwrap();
    let cos = cos_ranker(&index.data, &index.vocabulary).unwrap();
    for (f, _) in report.folds.iter().enumerate() {
        let test: Vec<&Query> = queries.iter().filter(|q| !report.folds[f].contains(&q.id)).collect();
        let direct = evaluate_queries(&cos, &test, &judgments, &[(Metric::Ndcg, 2)]);
        assert_eq!(report.value(Method::Cos, Metric::Ndcg, 2, f), Some(direct[0]));
    }
    assert_eq!(report.mean(Method::Cos, Metric::Ndcg, 2), Some(1.0));
}

#[test]
fn dominating_method_wins_every_fold() {
    let (index, queries) = separable_corpus();
    let report = cross_validate(&index, &queries, &small_config(vec![Method::Cos, Method::Lsi])).unwrap();
    for f in 0..5 {
        let cos = report.value(Method::Cos, Metric::Ndcg, 2, f).unwrap();
        let lsi = report.value(Method::Lsi, Metric::Ndcg, 2, f).unwrap();
        assert!(cos > lsi, "fold {f}: {cos} vs {lsi}");
    }
}

#[test]
fn failing_method_is_marked_not_fatal() {
    let (index, queries) = separable_corpus();
    let mut config = small_config(vec![Method::Cos, Method::Hmlcr]);
    config.hyper.k = 10_000;
    let report = cross_validate(&index, &queries, &config).unwrap();
    assert!(report.mean(Method::Cos, Metric::Precision, 1).is_some());
    assert!(report.mean(Method::Hmlcr, Metric::Precision, 1).is_none());
    assert_eq!(report.failures.len(), 5);
    assert!(report.to_tsv().contains("hmlcr\tP\t1\t0\tfailed"));
    assert!(report.summary_tsv().contains("hmlcr\tP\t1\tfailed"));
}

#[test]
fn learned_methods_run_and_report_is_repeatable() {
    let (index, queries) = separable_corpus();
    let config = small_config(Method::ALL.to_vec());
    let a = cross_validate(&index, &queries, &config).unwrap();
    let b = cross_validate(&index, &queries, &config).unwrap();
    assert!(a.failures.is_empty(), "{:?}", a.failures);
    assert_eq!(a.to_tsv(), b.to_tsv());
    assert!(a.rows.iter().all(|r| r.value.is_some_and(|v| (0.0..=1.0).contains(&v))));
    // 6 methods x 12 cells x 5 folds
    assert_eq!(a.to_tsv().lines().count(), 1 + 6 * 12 * 5);
    let conventional = EvalConfig {
        orientation: FoldOrientation::TestOnOne,
        ..config
    };
    assert!(cross_validate(&index, &queries, &conventional)
        .unwrap()
        .failures
        .is_empty());
}

#[test]
fn input_guards() {
    let (index, queries) = separable_corpus();
    let config = small_config(vec![Method::Cos]);
    assert!(matches!(
        cross_validate(&index, &queries[..3], &config),
        Err(Error::TooFewQueries { needed: 5, got: 3 })
    ));
    let mut unlabeled = queries.clone();
    unlabeled[0].label = None;
    assert!(matches!(
        cross_validate(&index, &unlabeled, &config),
        Err(Error::UnlabeledQuery(_))
    ));
}

#[test]
fn queries_without_relevant_documents_are_excluded() {
    let (index, mut queries) = separable_corpus();
    queries.push(Query::new("ghost", "phantom words", Some("missing".into())).unwrap());
    let report = cross_validate(&index, &queries, &small_config(vec![Method::Cos])).unwrap();
    assert_eq!(report.mean(Method::Cos, Metric::Ndcg, 2), Some(1.0));
    assert!(report.excluded.iter().flatten().any(|q| q == "ghost"));
}

#[test]
fn method_names_round_trip() {
    for m in Method::ALL {
        assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
    }
    assert!("bm25".parse::<Method>().is_err());
}
