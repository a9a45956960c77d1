#include "app.hpp"

#include <filesystem>
#include <map>

#include <CLI11.hpp>

#include "commands.hpp"
#include "obdeg/errors.hpp"

namespace obdeg::cli {

namespace {

struct Options {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
};

void check_name(const std::string& name) {
  if (name.empty()) throw ConfigError("/name: must not be empty");
  for (const char c : name)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.'))
      throw ConfigError("/name: only letters, digits, '-', '_' and '.' are allowed");
}

int execute(const std::string& subcommand, const Options& opt, std::ostream& out, std::ostream& err) {
  RunContext ctx;
  std::unique_ptr<Command> cmd;
  try {
    const json config = load_config(opt.config);
    const Section root(config, "");
    ctx.name = root.string("name", subcommand);
    check_name(ctx.name);
    const std::uint64_t file_seed = root.unsigned_integer("seed", 1);
    ctx.seed = opt.seed.value_or(file_seed);
    cmd = read_command(subcommand, root);
    root.finish();
  } catch (const ConfigError& e) {
    err << "obdeg " << subcommand << ": " << e.what() << "\n";
    return kConfigError;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::configuration) throw;
    err << "obdeg " << subcommand << ": " << e.what() << "\n";
    return kConfigError;
  }

  ctx.out_dir = opt.out;
  ctx.log = &out;
  std::filesystem::create_directories(ctx.out_dir);
  Report report(ctx.name, subcommand, ctx.seed, cmd->echo());
  int status = kPass;
  try {
    cmd->run(ctx, report);
    status = report.passed() ? kPass : kChecksFailed;
  } catch (const std::exception& e) {
    report.record_error(e);
    err << "obdeg " << subcommand << ": " << e.what() << "\n";
    status = kRuntimeError;
  }
  report.write(ctx.out_dir, ctx.name);
  out << (status == kPass ? "pass" : "FAIL") << ": " << (ctx.out_dir / (ctx.name + ".report.json")).string()
      << "\n";
  return status;
}

}  // namespace

int run_app(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Degree computations for elliptic problems with oblique boundary conditions", "obdeg"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);
  std::map<std::string, Options> options;
  const std::map<std::string, std::string> help{
      {"degree", "degree of a problem at a Newton zero"},
      {"solve", "damped Newton solve"},
      {"homotopy", "continuation along a problem family"},
      {"reflector", "near-field reflector solve"},
      {"yamabe", "sigma_1 boundary Yamabe toy"},
      {"verify", "operator and estimate checks"}};
  for (const std::string& name : subcommand_names()) {
    Options& o = options[name];
    CLI::App* sub = app.add_subcommand(name, help.at(name));
    sub->add_option("--config", o.config, "JSON configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "output directory")->capture_default_str();
    sub->add_option("--seed", o.seed, "random seed, overrides the configuration");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kPass : kConfigError;
  }
  for (const std::string& name : subcommand_names())
    if (app.got_subcommand(name)) {
      try {
        return execute(name, options[name], out, err);
      } catch (const std::exception& e) {
        err << "obdeg " << name << ": " << e.what() << "\n";
        return kRuntimeError;
      }
    }
  return kConfigError;
}

}  // namespace obdeg::cli
