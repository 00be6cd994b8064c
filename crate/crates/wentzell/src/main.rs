fn main() {
    std::process::exit(wentzell::app::run());
}
