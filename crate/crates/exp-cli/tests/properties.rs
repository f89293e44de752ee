use exp_cli::table::{Column, ResultTable, Value};
use exp_cli::ExperimentConfig;
use proptest::prelude::*;

fn any_num() -> impl Strategy<Value = f64> {
    prop_oneof![
        any::<f64>(),
        -1e6..1e6f64,
        Just(0.0),
        Just(-0.0),
        Just(f64::MIN_POSITIVE),
        Just(5e-324),
    ]
}

fn table() -> impl Strategy<Value = ResultTable> {
    (1usize..5, 1usize..4, 0usize..6).prop_flat_map(|(nums, texts, rows)| {
        let row = (
            prop::collection::vec(any_num(), nums),
            prop::collection::vec("[ -~]{0,12}", texts),
        );
        (
            prop::collection::vec(row, rows),
            prop::collection::vec(("[a-z_]{1,8}", "[ -~]{0,20}"), 0..4),
        )
            .prop_map(move |(rows, meta)| {
                let mut cols: Vec<Column> =
                    (0..nums).map(|i| Column::metric(format!("n{i}"))).collect();
                cols[0] = Column::param("n0");
                cols.extend((0..texts).map(|i| Column::text(format!("t{i}"))));
                let mut t = ResultTable::new(cols);
                for (k, v) in meta {
                    if k != "columns" {
                        t.meta(k, v);
                    }
                }
                for (ns, ts) in rows {
                    let mut r: Vec<Value> = ns.into_iter().map(Value::Num).collect();
                    r.extend(ts.into_iter().map(Value::Text));
                    t.push(r);
                }
                t
            })
    })
}

const BASE: &str = r#"
kind = "mfe"
seed = 1
[system]
n = 30
mu3 = 15.0
[[types]]
id = "a"
lambda = 1.0
v = 10.0
eta = 0.5
p_max = 1.0
f_max = 0.8
"#;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn csv_round_trip_is_bit_exact(t in table()) {
        let text = t.to_csv();
        let back = ResultTable::from_csv(&text).unwrap();
        prop_assert!(back.same(&t), "{text}");
        prop_assert_eq!(back.to_csv(), text);
    }

    #[test]
    fn hash_tracks_meaningful_fields(
        field in 0usize..5,
        value in 0.01..100.0f64,
        jobs in 1usize..16,
        description in "[a-z ]{0,20}",
    ) {
        let base = ExperimentConfig::parse(BASE).unwrap();
        let mut cosmetic = base.clone();
        cosmetic.jobs = Some(jobs);
        cosmetic.description = description;
        cosmetic.out = Some("elsewhere.csv".into());
        prop_assert_eq!(cosmetic.hash(), base.hash());

        let mut changed = base.clone();
        let t = &mut changed.types[0];
        let slot = match field {
            0 => &mut t.lambda,
            1 => &mut t.v,
            2 => &mut t.eta,
            3 => &mut t.p_max,
            _ => &mut t.f_max,
        };
        let differs = *slot != value;
        *slot = value;
        prop_assert_eq!(changed.hash() != base.hash(), differs);
    }

    #[test]
    fn hash_tracks_the_seed_and_solver(seed in any::<u64>(), starts in 1usize..20) {
        let base = ExperimentConfig::parse(BASE).unwrap();
        let mut c = base.clone();
        c.seed = seed;
        prop_assert_eq!(c.hash() != base.hash(), seed != base.seed);
        let mut s = base.clone();
        s.solver.multi_start = Some(starts);
        prop_assert_eq!(s.hash() != base.hash(), starts != base.solver_config().multi_start);
    }
}
