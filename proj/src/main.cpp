// dnls: direct/inverse scattering transforms, exact-in-time IST evolution,
// and a pseudospectral cross-check integrator for the derivative NLS family.
#include <CLI11.hpp>

#include "dnls/commands.hpp"

namespace {

void add_common(CLI::App* sub, dnls::CommonOpts& o, bool wants_output = true) {
  sub->add_option("--input", o.input, "input CSV path");
  sub->add_option("--preset", o.preset,
                  "gaussian-small | gaussian-medium | zero");
  if (wants_output) sub->add_option("--output", o.output, "output CSV path");
  sub->add_option("--threads", o.threads, "cap worker threads (0 = default)");
  sub->add_flag("--serial", o.serial, "force the serial reference drivers");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical inverse scattering for the derivative NLS family"};
  app.require_subcommand(1);

  dnls::DirectOpts dir_o;
  auto* dir = app.add_subcommand("direct", "potential -> scattering data");
  add_common(dir, dir_o);
  dir->add_flag("--check", dir_o.check,
                "fail (exit 3) if the spectral condition is violated");

  dnls::InverseOpts inv_o;
  auto* inv = app.add_subcommand("inverse", "scattering data -> potential");
  add_common(inv, inv_o);
  inv->add_option("--xs", inv_o.xs, "evaluation points lo:hi:n");
  inv->add_option("--tol", inv_o.tol, "Krylov relative tolerance");

  dnls::EvolveOpts evo_o;
  auto* evo = app.add_subcommand("evolve", "solve the Cauchy problem via IST");
  add_common(evo, evo_o);
  evo->add_option("--t", evo_o.t, "target time")->required();
  evo->add_option("--dt", evo_o.dt, "stepper dt (pde/both paths)");
  evo->add_option("--via", evo_o.via, "ist | pde | both");

  dnls::OracleOpts ora_o;
  auto* ora = app.add_subcommand("oracle", "pseudospectral time integration");
  add_common(ora, ora_o);
  ora->add_option("--t", ora_o.t, "target time")->required();
  ora->add_option("--dt", ora_o.dt, "time step");
  ora->add_option("--eq", ora_o.eq, "dnls2 | dnls1");

  dnls::RoundtripOpts rt_o;
  auto* rt = app.add_subcommand("roundtrip", "inverse(direct(q)) vs q");
  add_common(rt, rt_o);
  rt->add_option("--tol", rt_o.tol, "sup-error tolerance");

  dnls::CheckOpts chk_o;
  auto* chk = app.add_subcommand("check",
                                 "spectral condition + determinant identity");
  add_common(chk, chk_o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // exit 0 with help text
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return dnls::kExitUsage;
  }

  if (dir->parsed()) return dnls::cmd_direct(dir_o);
  if (inv->parsed()) return dnls::cmd_inverse(inv_o);
  if (evo->parsed()) return dnls::cmd_evolve(evo_o);
  if (ora->parsed()) return dnls::cmd_oracle(ora_o);
  if (rt->parsed()) return dnls::cmd_roundtrip(rt_o);
  if (chk->parsed()) return dnls::cmd_check(chk_o);
  return dnls::kExitUsage;
}
