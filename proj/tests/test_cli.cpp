// Copyright 2026 The Apex Authors
//
// Licensed under the Apache License v2.0.
// See https://www.apache.org/licenses/LICENSE-2.0 for license information.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "apex/textio.h"
#include "support.h"

#include "json.hpp"

#include <cstdlib>
#include <filesystem>

using namespace apex;
using testing::readText;
using testing::runCli;
using testing::samplePath;

namespace {

std::string tempPath(const std::string &name) {
  return (std::filesystem::temp_directory_path() / ("apex_test_" + name)).string();
}

nlohmann::json readJson(const std::string &path) {
  return nlohmann::json::parse(readText(path));
}

} // namespace

TEST_CASE("conv2d im2col compile with verification") {
  std::string stats = tempPath("conv.json");
  auto r = runCli({"compile", samplePath("conv2d.gls"), "--rules", "im2col,mapping",
                   "--check", "50", "--stats", stats});
  CHECK(r.code == cli::kOk);
  CHECK(r.out.find("systolicArray") != std::string::npos);
  nlohmann::json j = readJson(stats);
  CHECK(j["schema"] == 1);
  CHECK(j["offloads"]["systolicArray"].get<int>() >= 1);
  CHECK(j["verify"]["verdict"] == "exact-equal");
  CHECK(j["verify"]["trials"] == 50);
  CHECK(j["saturation"]["stop"] == "fixpoint");
  CHECK(j["cost"]["extracted"].get<uint64_t>() <= j["cost"]["input"].get<uint64_t>());
  CHECK(textio::parse(r.out).vars.size() == 2);
}

TEST_CASE("blocked matmul reports eight 16x16 calls") {
  std::string stats = tempPath("mm32.json");
  auto r = runCli({"compile", samplePath("matmul32.gls"), "--rules", "blocking,mapping",
                   "--cost", "reduceSum=1", "--check", "3", "--stats", stats});
  CHECK(r.code == cli::kOk);
  nlohmann::json j = readJson(stats);
  CHECK(j["offloads"]["systolicArray"] == 8);
  CHECK(j["offload_details"]["systolicArray"]["16x16"] == 8);
  CHECK(j["verify"]["verdict"] == "exact-equal");
}

TEST_CASE("empty rule selection leaves the program alone") {
  std::string stats = tempPath("none.json");
  std::string input = samplePath("matmul.gls");
  auto r = runCli({"compile", input, "--rules", "", "--stats", stats});
  CHECK(r.code == cli::kOk);
  textio::Program in = textio::parse(readText(input));
  CHECK(r.out == textio::printProgram(in));
  nlohmann::json j = readJson(stats);
  CHECK(j["cost"]["input"] == j["cost"]["extracted"]);
  CHECK(j["rules"].empty());
}

TEST_CASE("repeated runs are byte-identical") {
  for (const char *sample : {"conv2d.gls", "matmul32.gls", "linear_reshape_add.gls"}) {
    std::string s1 = tempPath("rep1.json"), s2 = tempPath("rep2.json");
    std::vector<std::string> args = {"compile", samplePath(sample), "--target", "all",
                                     "--cost", "reduceSum=1", "--check", "5",
                                     "--seed", "17"};
    auto a = args, b = args;
    a.insert(a.end(), {"--stats", s1});
    b.insert(b.end(), {"--stats", s2});
    auto r1 = runCli(a), r2 = runCli(b);
    CHECK(r1.code == r2.code);
    CHECK(r1.out == r2.out);
    CHECK(readText(s1) == readText(s2));
  }
}

TEST_CASE("compile errors exit 1 with a located diagnostic") {
  std::string bad = tempPath("bad.gls");
  testing::writeText(bad, "(flatten");
  auto r = runCli({"compile", bad});
  CHECK(r.code == cli::kCompileError);
  CHECK(r.err == bad + ":1:1: error: unclosed form: missing ')'\n");
  CHECK(r.out.empty());

  std::string illFormed = tempPath("ill.gls");
  testing::writeText(illFormed, "(var x (shape 2 3))\n(squeeze (access x 1) 0)\n");
  auto w = runCli({"compile", illFormed});
  CHECK(w.code == cli::kCompileError);
  CHECK(w.err.find("squeeze of non-1 dim") != std::string::npos);

  CHECK(runCli({"compile", tempPath("missing.gls")}).code == cli::kCompileError);
  CHECK(runCli({"compile", samplePath("matmul.gls"), "--rules", "nonsense"}).code ==
        cli::kCompileError);
  CHECK(runCli({"compile", samplePath("matmul.gls"), "--cost", "accel=9,compute=1"}).code ==
        cli::kCompileError);
  CHECK(runCli({"compile", samplePath("matmul.gls"), "--target", "tpu"}).code ==
        cli::kCompileError);
  CHECK(runCli({"compile"}).code == cli::kCompileError);
}

TEST_CASE("a verification mismatch exits 2") {
  // An unsound rule that the cost model prefers.
  rewrite::Rule bogus;
  bogus.name = "bogus";
  bogus.group = "generic";
  bogus.alternatives.push_back(
      {rewrite::pnode(NodeKind::Compute, {static_cast<int64_t>(OperatorKind::ReduceSum)},
                      {rewrite::pvar("x")}),
       [](const rewrite::EGraph &, const rewrite::Match &) -> std::vector<rewrite::Pattern> {
         return {rewrite::pnode(NodeKind::Compute,
                                {static_cast<int64_t>(OperatorKind::ReduceMax)},
                                {rewrite::pvar("x")})};
       }});
  std::string input = tempPath("sum.gls");
  testing::writeText(input, "(var t (shape 3 4))\n(compute reduceSum (access t 1))\n");
  cli::CompileOptions opts;
  opts.input = input;
  opts.groups = {};
  opts.extraRules = {bogus};
  opts.cost = rewrite::CostModel::parse("reduceMax=1");
  opts.check = 10;
  std::ostringstream out, err;
  cli::RunReport report = cli::compile(opts, out, err);
  CHECK(report.exitCode == cli::kVerifyFailed);
  CHECK(report.verdict == "mismatch");
  CHECK(out.str().find("reduceMax") != std::string::npos);

  // Without verification the same run succeeds.
  opts.check = 0;
  std::ostringstream out2, err2;
  CHECK(cli::compile(opts, out2, err2).exitCode == cli::kOk);
}

TEST_CASE("a resource limit without improvement exits 3") {
  auto r = runCli({"compile", samplePath("matmul32.gls"), "--rules", "blocking,mapping",
                   "--iter-limit", "1"});
  CHECK(r.code == cli::kLimitNoGain);
  // Hitting a limit while still improving is a success.
  auto ok = runCli({"compile", samplePath("conv2d.gls"), "--rules", "im2col,mapping",
                    "--iter-limit", "5"});
  CHECK(ok.code == cli::kOk);
  CHECK(ok.out.find("systolicArray") != std::string::npos);
}

TEST_CASE("seed from the environment") {
  std::string s1 = tempPath("env1.json"), s2 = tempPath("env2.json");
  setenv("APEX_SEED", "123", 1);
  auto r = runCli({"compile", samplePath("matmul.gls"), "--check", "4", "--stats", s1});
  unsetenv("APEX_SEED");
  CHECK(r.code == cli::kOk);
  CHECK(readJson(s1)["verify"]["seed"] == 123);
  runCli({"compile", samplePath("matmul.gls"), "--check", "4", "--seed", "9", "--stats", s2});
  CHECK(readJson(s2)["verify"]["seed"] == 9);
}

TEST_CASE("float verification reports the relative error") {
  std::string stats = tempPath("float.json");
  auto r = runCli({"compile", samplePath("conv2d.gls"), "--rules", "im2col,mapping",
                   "--check", "5", "--check-mode", "float", "--stats", stats});
  CHECK(r.code == cli::kOk);
  nlohmann::json j = readJson(stats);
  CHECK(j["verify"]["mode"] == "float");
  CHECK(j["verify"]["max_relative_error"].get<double>() < 1e-9);
}

TEST_CASE("json emission and output files") {
  std::string outFile = tempPath("out.json");
  auto r = runCli({"compile", samplePath("linear_bias_add.gls"), "--target", "vta",
                   "--emit", "json", "-o", outFile});
  CHECK(r.code == cli::kOk);
  CHECK(r.out.empty());
  nlohmann::json j = readJson(outFile);
  CHECK(j["vars"].size() == 3);
  CHECK(j["expr"]["op"] == "bias_add");
  CHECK(j["expr"]["args"][0]["op"] == "vta-dense");
}

TEST_CASE("fuzz-rules subcommand") {
  auto r = runCli({"fuzz-rules", "--rules", "mapping", "--trials", "10", "--seed", "3"});
  CHECK(r.code == cli::kOk);
  for (const char *name : {"M1", "M2", "M3"})
    CHECK(r.out.find(name) != std::string::npos);
  CHECK(runCli({"fuzz-rules", "--rules", "nonsense"}).code == cli::kCompileError);
}
