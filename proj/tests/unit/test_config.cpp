#include "doctest.h"
#include "qlink/model/config.hpp"
#include "qlink/model/network.hpp"

using namespace qlink::model;

TEST_CASE("parse sections, comments and values") {
  const auto cfg = Config::parse(
      "# top comment\n"
      "[chip1]\n"
      "nu_q_mhz = 4768.5   ; trailing\n"
      "\n"
      "[model]\n"
      "include_bright = no\n"
      "list = 1, 2.5 ,3\n",
      "test.ini");
  CHECK(cfg.get_double("chip1", "nu_q_mhz", 0) == 4768.5);
  CHECK(cfg.get_bool("model", "include_bright", true) == false);
  CHECK(cfg.get_list("model", "list", {}) == std::vector<double>{1, 2.5, 3});
  CHECK(cfg.find("chip1", "nu_q_mhz")->line == 3);
  CHECK(cfg.get_double("chip1", "missing", 7.0) == 7.0);
}

TEST_CASE("diagnostics carry the line number") {
  auto line_of = [](const std::string& text) {
    try {
      auto cfg = Config::parse(text, "f.ini");
      network_from_config(cfg);
    } catch (const ConfigError& e) {
      return e.line();
    }
    return -1;
  };
  CHECK(line_of("[chip1]\nnu_q_mhz 4\n") == 2);
  CHECK(line_of("nu_q_mhz = 4\n") == 1);
  CHECK(line_of("[chip1\n") == 1);
  CHECK(line_of("[chip1]\nnu_q_mhz = 1\nnu_q_mhz = 2\n") == 3);
  CHECK(line_of("[chip1]\n\n\nnu_q_mhz = fast\n") == 4);
  CHECK(line_of("[chip2]\nbogus = 1\n") == 2);
  CHECK(line_of("[chip1]\nt1_ns = 100\nt2_ns = 900\n") == 3);
  CHECK(line_of("[model]\ncoupling_signs = sideways\n") == 2);
  CHECK(line_of("[model]\ng_eff_mhz = 40\n") == 2);
  CHECK(line_of("[chip1]\nnu_q_mhz = 4768.5\n") == -1);
}

TEST_CASE("overrides and canonical dump") {
  auto cfg = Config::parse("[model]\ng_eff_mhz = 2\n");
  cfg.set_override("model.g_eff_mhz=1.5");
  cfg.set_override("chip1.t1_ns = 20000");
  CHECK(cfg.get_double("model", "g_eff_mhz", 0) == 1.5);
  CHECK_THROWS_AS(cfg.set_override("nodot=1"), ConfigError);
  CHECK_THROWS_AS(cfg.set_override("a.b"), ConfigError);
  CHECK(cfg.dump() == "[chip1]\nt1_ns = 20000\n\n[model]\ng_eff_mhz = 1.5\n");
  const auto again = Config::parse(cfg.dump());
  CHECK(again.dump() == cfg.dump());
}

TEST_CASE("network from config applies units") {
  const auto cfg = Config::parse(
      "[chip1]\nt1_ns = 20000\nt2_ns = 20000\n"
      "[interconnect]\ndelta_mhz = 0\nt1_dark_ns = inf\n"
      "[model]\ncoupling_signs = physical\nskew_q2_ns = 10\n");
  const auto net = network_from_config(cfg);
  CHECK(net.chips[0].T1 == doctest::Approx(20e-6));
  CHECK(net.link.delta == 0.0);
  CHECK(net.link.kappa_dark == 0.0);
  CHECK(net.transfer.coupling == CouplingSign::Physical);
  CHECK(net.skew_q2 == doctest::Approx(10e-9));
  CHECK(net.chips[1].T1 == default_chip(1).T1);
}
