fn main() -> std::process::ExitCode {
    std::process::ExitCode::from(periodic_orbits::cli::main() as u8)
}
