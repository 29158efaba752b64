fn main() { std::process::exit(irs_outage::cli::run()) }
