// Copyright 2026 The LowPose Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <string>

#include "commands.hpp"
#include "lowpose/error.hpp"
#include "usage_error.hpp"

namespace {

using namespace lowpose::cli;

void init_logging() {
  auto logger = spdlog::stderr_color_mt("lowpose");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  const char* env = std::getenv("LOWPOSE_LOG");
  if (!env) return;
  const std::string level = env;
  if (level == "error") {
    spdlog::set_level(spdlog::level::err);
  } else if (level == "warn") {
    spdlog::set_level(spdlog::level::warn);
  } else if (level == "info") {
    spdlog::set_level(spdlog::level::info);
  } else if (level == "debug") {
    spdlog::set_level(spdlog::level::debug);
  } else {
    spdlog::warn("ignoring LOWPOSE_LOG={}; expected error, warn, info or debug", level);
  }
}

void add_common(CLI::App* sub, Common& c, bool config_required = true) {
  auto* opt = sub->add_option("--config", c.config, "pipeline config file");
  if (config_required) opt->required();
  opt->check(CLI::ExistingFile);
  sub->add_option("--jobs", c.jobs, "worker threads (default: logical cores)")
      ->check(CLI::NonNegativeNumber);
}

}  // namespace

int main(int argc, char** argv) {
  init_logging();
  CLI::App app{"Low-light multi-person pose toolkit"};
  app.require_subcommand(1);

  Common common;
  std::function<int()> action;

  AugmentOptions aug;
  auto* augment = app.add_subcommand("augment", "batch image augmentation");
  augment->add_option("mode", aug.mode, "ella | adjusted-ella | pda")
      ->required()
      ->check(CLI::IsMember({"ella", "adjusted-ella", "pda"}));
  add_common(augment, common);
  augment->add_option("--seed", aug.seed, "base seed (default: pipeline.seed)");
  augment->add_option("--in", aug.in_dir, "input image directory")->required();
  augment->add_option("--out", aug.out_dir, "output directory")->required();
  augment->add_option("--poses", aug.poses, "pseudo labels (poses.json), required for pda");
  augment->add_option("--annotations", aug.annotations,
                      "annotation file mapping image file names to ids (pda)");
  augment->callback([&] { action = [&] { return run_augment(common, aug); }; });

  EncodeOptions enc;
  auto* encode = app.add_subcommand("encode", "ground-truth target maps per image");
  add_common(encode, common);
  encode->add_option("--annotations", enc.annotations, "annotation file")->required();
  encode->add_option("--out", enc.out_dir, "container directory")->required();
  encode->callback([&] { action = [&] { return run_encode(common, enc); }; });

  DecodeOptions dec;
  auto* decode = app.add_subcommand("decode", "model outputs to poses.json");
  decode->add_option("mode", dec.mode, "center | keypoint")
      ->required()
      ->check(CLI::IsMember({"center", "keypoint"}));
  add_common(decode, common);
  decode->add_option("--tensors", dec.tensors_dir, "directory of <image_id>.lptc")->required();
  decode->add_option("--out", dec.out, "output poses.json")->required();
  decode->add_option("--coco-results", dec.coco_results, "also write COCO results JSON");
  decode->callback([&] { action = [&] { return run_decode(common, dec); }; });

  FuseOptions fus;
  auto* fuse = app.add_subcommand("fuse", "dual-teacher pseudo-label fusion");
  add_common(fuse, common);
  fuse->add_option("--main", fus.main, "main-teacher poses.json")->required();
  fuse->add_option("--comp", fus.comp, "complementary-teacher poses.json")->required();
  fuse->add_option("--out", fus.out, "output poses.json")->required();
  fuse->add_option("--coco-results", fus.coco_results, "also write COCO results JSON");
  fuse->callback([&] { action = [&] { return run_fuse(common, fus); }; });

  EvaluateOptions ev;
  auto* evaluate = app.add_subcommand("evaluate", "OKS average precision");
  add_common(evaluate, common);
  evaluate->add_option("--pred", ev.pred, "predictions poses.json")->required();
  evaluate->add_option("--gt", ev.gt, "annotation file")->required();
  evaluate->add_option("--report", ev.report, "write the report as JSON");
  evaluate->callback([&] { action = [&] { return run_evaluate(common, ev); }; });

  StatsOptions st;
  auto* stats = app.add_subcommand("stats", "pseudo-label and center-error analyses");
  stats->add_option("mode", st.mode, "pseudo-labels | center-error")
      ->required()
      ->check(CLI::IsMember({"pseudo-labels", "center-error"}));
  add_common(stats, common);
  stats->add_option("--main", st.main, "main-teacher pseudo labels");
  stats->add_option("--comp", st.comp, "complementary-teacher pseudo labels");
  stats->add_option("--pred", st.pred, "predictions for center-error");
  stats->add_option("--gt", st.gt, "annotation file")->required();
  stats->add_option("--report", st.report, "write the table as JSON");
  stats->callback([&] { action = [&] { return run_stats(common, st); }; });

  LossOptions lo;
  auto* loss = app.add_subcommand("loss", "print loss kernel values");
  add_common(loss, common);
  loss->add_option("--pred", lo.pred, "prediction container")->required();
  loss->add_option("--gt", lo.gt, "ground-truth container from encode")->required();
  loss->callback([&] { action = [&] { return run_loss(common, lo); }; });

  SynthOptions sy;
  auto* synth = app.add_subcommand("synth", "synthetic annotated scenes");
  add_common(synth, common, false);
  synth->add_option("--out", sy.out_dir, "output directory")->required();
  synth->add_option("--seed", sy.seed, "seed (default: pipeline.seed)");
  synth->add_option("--images", sy.images, "image count");
  synth->add_option("--min-people", sy.min_people, "people per image, lower bound");
  synth->add_option("--max-people", sy.max_people, "people per image, upper bound");
  synth->add_option("--width", sy.width, "image width");
  synth->add_option("--height", sy.height, "image height");
  synth->callback([&] { action = [&] { return run_synth(common, sy); }; });

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "noisy model outputs from encoded targets");
  add_common(simulate, common, false);
  simulate->add_option("--tensors", sim.tensors_dir, "encode output directory")->required();
  simulate->add_option("--out", sim.out_dir, "prediction container directory")->required();
  simulate->add_option("--seed", sim.seed, "seed (default: pipeline.seed)");
  simulate->add_option("--heatmap-noise", sim.heatmap_noise, "relative heatmap jitter (std)");
  simulate->add_option("--offset-noise", sim.offset_noise, "offset jitter in map pixels (std)");
  simulate->add_option("--tag-noise", sim.tag_noise, "tag jitter (std)");
  simulate->callback([&] { action = [&] { return run_simulate(common, sim); }; });

  auto* config = app.add_subcommand("config", "print the effective config");
  add_common(config, common, false);
  config->callback([&] { action = [&] { return run_config_dump(common); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  try {
    return action();
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const lowpose::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
