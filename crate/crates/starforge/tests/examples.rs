macro_rules! example_test {
    ($module:ident, $file:literal) => {
        #[allow(dead_code)]
        mod $module {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }

        #[test]
        fn $module() {
            $module::run_example().expect(concat!($file, " should run"));
        }
    };
}

example_test!(lines_invariants, "lines_invariants.rs");
example_test!(random_tower, "random_tower.rs");
example_test!(degenerate_step, "degenerate_step.rs");
example_test!(nested_pairs, "nested_pairs.rs");
example_test!(planes_deformation, "planes_deformation.rs");
example_test!(theta_ribbon, "theta_ribbon.rs");
example_test!(cli_report, "cli_report.rs");
