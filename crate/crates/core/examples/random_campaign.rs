//! A small seeded campaign written as CSV. The output is identical for any
//! number of worker threads.

use qcorr::campaign::{sample_csv, CampaignConfig};

fn main() -> qcorr::Result<()> {
    let cfg = CampaignConfig {
        count: Some(8),
        seed: 42,
        rank: Some(2),
        ..CampaignConfig::default()
    };
    let serial = sample_csv(&CampaignConfig { jobs: Some(1), ..cfg.clone() })?;
    let parallel = sample_csv(&CampaignConfig { jobs: Some(4), ..cfg })?;
    assert_eq!(serial, parallel);
    print!("{serial}");
    Ok(())
}
