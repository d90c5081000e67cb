mod criteria;
mod oracles;

fn check(outcome: criteria::Outcome) {
    match outcome {
        Ok(summary) => eprintln!("{summary}"),
        Err(e) => panic!("{e}"),
    }
}

#[test]
fn example_query_on_fixture() {
    check(criteria::example_query());
}

#[test]
fn level13_mean_area() {
    check(criteria::level13_area());
}

#[test]
fn grid_structure() {
    check(criteria::dgg_structure());
}

#[test]
fn de9im_matches_point_sampling() {
    check(criteria::de9im());
}

#[test]
fn ingestion_counts_and_idempotence() {
    check(criteria::ingestion_counting());
}

#[test]
fn raster_means_match_bucketing() {
    check(criteria::raster());
}

#[test]
fn provenance_in_three_hops() {
    check(criteria::provenance());
}

#[test]
fn validation_and_mutations() {
    check(criteria::validation());
}

#[test]
fn store_and_query_soundness() {
    check(criteria::store_soundness());
}
