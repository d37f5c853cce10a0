// osmloc command-line tool: rasterize OSM extracts, build semantic
// embeddings, localize single frames against map tiles, track sequences,
// evaluate pose estimates, and benchmark the matcher backends.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "osmloc/bev.hpp"
#include "osmloc/config.hpp"
#include "osmloc/embedding.hpp"
#include "osmloc/error.hpp"
#include "osmloc/eval.hpp"
#include "osmloc/geometry.hpp"
#include "osmloc/manifest.hpp"
#include "osmloc/match.hpp"
#include "osmloc/mcl.hpp"
#include "osmloc/osm_ingest.hpp"
#include "osmloc/png_io.hpp"
#include "osmloc/providers.hpp"
#include "osmloc/raster.hpp"
#include "osmloc/rng.hpp"
#include "osmloc/simd/kernels.hpp"
#include "osmloc/taxonomy.hpp"
#include "osmloc/tensor_io.hpp"

namespace {

using namespace osmloc;

std::vector<double> parse_numbers(const std::string& text, std::size_t expect,
                                  const std::string& what) {
  std::vector<double> out;
  std::istringstream ss(text);
  std::string field;
  while (std::getline(ss, field, ',')) {
    try {
      out.push_back(std::stod(field));
    } catch (const std::exception&) {
      throw ConfigError(what + ": bad number '" + field + "'");
    }
  }
  if (out.size() != expect) {
    throw ConfigError(what + ": expected " + std::to_string(expect) + " comma-separated values");
  }
  return out;
}

std::uint64_t fnv1a(const void* data, std::size_t size) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t h = 1469598103934665603ULL;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ULL;
  }
  return h;
}

ClassTaxonomy load_taxonomy(const std::string& path) {
  return path.empty() ? ClassTaxonomy::default_taxonomy() : ClassTaxonomy::load_file(path);
}

MapTile tile_of_whole_raster(RasterMap raster) {
  MapTile tile;
  tile.center = LocalPoint{raster.origin.x + (raster.width - 1) * 0.5 * raster.gsd,
                           raster.origin.y + (raster.height - 1) * 0.5 * raster.gsd};
  tile.width_meters = raster.width * raster.gsd;
  tile.height_meters = raster.height * raster.gsd;
  tile.raster = std::move(raster);
  return tile;
}

DepthDistribution alpha_from_grid(const FeatureGrid& grid) {
  grid.require_frame(FrameTag::ImagePlane, "depth distribution tensor");
  DepthDistribution alpha(grid.rows, grid.cols, grid.channels);
  alpha.p = grid.data;
  alpha.validate_simplex();
  return alpha;
}

// Applies the fixed channel adapter cell-wise so external feature tensors
// match the 3 * c_sem semantic space used for the map features.
FeatureGrid adapt_bev(const FeatureGrid& bev, const ChannelAdapter& adapter) {
  if (adapter.identity) return bev;
  FeatureGrid out(bev.rows, bev.cols, adapter.out_channels, bev.frame);
  for (int r = 0; r < bev.rows; ++r) {
    for (int c = 0; c < bev.cols; ++c) adapter.apply(bev.cell(r, c), out.cell(r, c));
  }
  return out;
}

struct LocalizeArgs {
  std::string map_path;
  std::string taxonomy_path;
  std::string synth_pose;
  std::string features_path;
  std::string alpha_path;
  std::string camera;
  std::string restrict_spec;
  std::string prior_spec;
  std::string volume_out;
  std::string heatmap_out;
  std::string gt_spec;
  std::string backend = "fft";
  int lateral_bins = 0;
  int rotations = 0;
  bool single_weighting = false;
  bool valid_cell_norm = false;
};

int cmd_localize(const RunConfig& cfg, const LocalizeArgs& args) {
  const auto taxonomy = load_taxonomy(args.taxonomy_path);
  const auto table =
      build_embedding_table(taxonomy, cfg.c_sem, substream_seed(cfg.seed, "embedding"));
  const MapTile tile = tile_of_whole_raster(read_osmr_file(args.map_path));
  const FeatureGrid map_semantic = embed_map(tile, table);
  const VolumeGeo geo{tile.raster.gsd, tile.raster.origin};

  const DepthBins bins{cfg.bev_d0, cfg.bev_delta, cfg.bev_depth_bins};
  const int lateral = args.lateral_bins > 0 ? args.lateral_bins : cfg.bev_lateral_bins;

  FeatureGrid image;
  DepthDistribution alpha;
  CameraIntrinsics cam;
  if (!args.synth_pose.empty()) {
    const auto pose_v = parse_numbers(args.synth_pose, 3, "--synth-pose");
    if (!args.camera.empty()) {
      const auto cv = parse_numbers(args.camera, 4, "--camera");
      cam = CameraIntrinsics{cv[0], cv[1], static_cast<int>(cv[2]), static_cast<int>(cv[3])};
    } else {
      // default synthetic camera: ~90 degree FoV, one row per depth bin
      const int cols = 2 * cfg.bev_depth_bins;
      cam = CameraIntrinsics{cols / 2.0, cols / 2.0, cfg.bev_depth_bins, cols};
    }
    const Pose pose{pose_v[0], pose_v[1], wrap_angle(pose_v[2])};
    auto synth = synth_image_features(tile, table, pose, cam, bins);
    image = std::move(synth.image);
    alpha = std::move(synth.alpha);
  } else {
    if (args.features_path.empty() || args.alpha_path.empty()) {
      throw ConfigError("localize: pass either --synth-pose or both --features and --alpha");
    }
    image = load_feature_tensor(args.features_path);
    alpha = alpha_from_grid(load_feature_tensor(args.alpha_path));
    if (args.camera.empty()) {
      throw ConfigError("localize: --camera fx,cx,rows,cols is required with file features");
    }
    const auto cv = parse_numbers(args.camera, 4, "--camera");
    cam = CameraIntrinsics{cv[0], cv[1], static_cast<int>(cv[2]), static_cast<int>(cv[3])};
    if (alpha.bins != bins.count) {
      throw ConfigError("localize: depth distribution bins do not match the configured D");
    }
  }

  const bool single = cfg.bev_single_weighting || args.single_weighting;
  const FeatureGrid polar = lift_to_polar(image, alpha, single);
  FeatureGrid bev = polar_to_cartesian(polar, cam, bins, lateral, cfg.gsd);
  const auto adapter = make_channel_adapter(bev.channels, map_semantic.channels,
                                            substream_seed(cfg.seed, "channel-adapter"));
  bev = adapt_bev(bev, adapter);

  MatchConfig mcfg;
  mcfg.rotations = args.rotations > 0 ? args.rotations : cfg.k_rotations_infer;
  mcfg.bev_gsd = cfg.gsd;
  mcfg.threads = cfg.threads;
  mcfg.valid_cell_norm = args.valid_cell_norm;

  std::optional<PoseRegion> restriction;
  if (!args.restrict_spec.empty()) {
    if (args.prior_spec.empty()) {
      throw ConfigError("localize: --restrict needs --prior x,y,theta");
    }
    const auto rv = parse_numbers(args.restrict_spec, 2, "--restrict");
    const auto pv = parse_numbers(args.prior_spec, 3, "--prior");
    PoseRegion region;
    region.center = LocalPoint{pv[0], pv[1]};
    region.center_theta = wrap_angle(pv[2]);
    region.half_extent_m = rv[0];
    region.half_angle = rv[1] * kPi / 180.0;
    restriction = region;
  }

  const bool use_fft = args.backend == "fft";
  if (!use_fft && args.backend != "brute") {
    throw ConfigError("localize: --backend must be fft or brute");
  }
  const PoseVolume scores = use_fft ? score_poses_fft(map_semantic, geo, bev, bins, mcfg)
                                    : score_poses_bruteforce(map_semantic, geo, bev, bins, mcfg);
  const PoseVolume prob = softmax_volume(scores, restriction);
  const auto [pose, flat] = argmax_pose(prob);
  const auto cell = prob.cell_of_flat(flat);

  std::printf("pose: x=%.9f y=%.9f theta=%.9f\n", pose.x, pose.y, pose.theta);
  std::printf("cell: h=%d w=%d k=%d p=%.9e\n", cell.h, cell.w, cell.k,
              prob.at(cell.h, cell.w, cell.k));

  if (!args.gt_spec.empty()) {
    const auto gv = parse_numbers(args.gt_spec, 3, "--gt");
    const Pose gt{gv[0], gv[1], wrap_angle(gv[2])};
    const double nll = pose_nll_loss(prob, gt);
    const double sem =
        semantic_alignment_loss(bev, map_semantic, geo, gt,
                                make_channel_adapter(bev.channels, map_semantic.channels,
                                                     substream_seed(cfg.seed, "channel-adapter")),
                                bins, cfg.gsd);
    std::printf("loss: pose_nll=%.9f semantic=%.9f\n", nll, sem);
  }

  if (!args.volume_out.empty()) {
    FeatureGrid grid(prob.height, prob.width, prob.rotations, FrameTag::MapPlane);
    for (std::size_t i = 0; i < prob.values.size(); ++i) {
      grid.data[i] = static_cast<float>(prob.values[i]);
    }
    write_osmf_file(args.volume_out, grid);
  }
  if (!args.heatmap_out.empty()) write_heatmap_png(args.heatmap_out, prob);
  return 0;
}

int cmd_selftest(const RunConfig& cfg) {
  std::printf("simd: %s\n", simd::active_backend());

  const auto taxonomy = ClassTaxonomy::default_taxonomy();
  const auto table = build_embedding_table(taxonomy, 4, substream_seed(cfg.seed, "embedding"));

  RasterMap raster(48, 48, 0.5, LocalPoint{0.0, 0.0});
  for (int r = 28; r < 40; ++r) {
    for (int c = 8; c < 20; ++c) raster.set(0, r, c, 1);
  }
  for (int r = 6; r < 16; ++r) {
    for (int c = 30; c < 44; ++c) raster.set(0, r, c, 4);
  }
  for (int r = 30; r < 44; ++r) {
    for (int c = 30; c < 38; ++c) raster.set(0, r, c, 5);
  }
  for (int c = 0; c < 48; ++c) {
    raster.set(1, 23, c, 2);
    const int diag = 4 + (3 * c) / 4;  // oblique road breaks the symmetry
    if (diag < 48) raster.set(1, diag, c, 1);
  }
  raster.set(2, 34, 30, 1);
  raster.set(2, 12, 12, 4);
  raster.set(2, 40, 24, 3);
  raster.set(2, 18, 40, 5);

  std::ostringstream raster_bytes;
  write_osmr(raster_bytes, raster);
  const std::string rb = raster_bytes.str();
  std::printf("raster: %dx%d hash=%016llx\n", raster.width, raster.height,
              static_cast<unsigned long long>(fnv1a(rb.data(), rb.size())));

  const MapTile tile = tile_of_whole_raster(raster);
  const FeatureGrid msem = embed_map(tile, table);
  std::ostringstream msem_bytes;
  write_osmf(msem_bytes, msem);
  const std::string mb = msem_bytes.str();
  std::printf("embedding: channels=%d hash=%016llx\n", msem.channels,
              static_cast<unsigned long long>(fnv1a(mb.data(), mb.size())));

  const DepthBins bins{0.0, 0.5, 16};
  const CameraIntrinsics cam{12.0, 12.0, 16, 24};
  // heading at a K = 32 rotation bin center so the argmax can hit exactly
  const Pose planted{12.0, 10.0, -kPi + 2.0 * kPi * 24.5 / 32.0};
  const auto synth = synth_image_features(tile, table, planted, cam, bins);
  const auto polar = lift_to_polar(synth.image, synth.alpha);
  const auto bev = polar_to_cartesian(polar, cam, bins, 33, 0.5);

  MatchConfig mcfg;
  mcfg.rotations = 32;
  mcfg.bev_gsd = 0.5;
  mcfg.threads = cfg.threads;
  const VolumeGeo geo{0.5, raster.origin};
  const auto fft_best = argmax_pose(softmax_volume(score_poses_fft(msem, geo, bev, bins, mcfg)));
  const auto brute_best =
      argmax_pose(softmax_volume(score_poses_bruteforce(msem, geo, bev, bins, mcfg)));
  std::printf("localize: fft=(%.6f, %.6f, %.6f) brute_agrees=%d\n", fft_best.first.x,
              fft_best.first.y, fft_best.first.theta,
              fft_best.second == brute_best.second ? 1 : 0);
  std::printf("localize: planted=(%.6f, %.6f, %.6f) err=%.6f\n", planted.x, planted.y,
              planted.theta,
              std::hypot(fft_best.first.x - planted.x, fft_best.first.y - planted.y));

  std::vector<TrackFrame> frames;
  std::vector<Pose> path = {planted};
  for (int step = 1; step <= 2; ++step) {
    path.push_back(Pose{planted.x + 2.0 * step * planted.fx(),
                        planted.y + 2.0 * step * planted.fy(), planted.theta});
  }
  for (std::size_t t = 0; t < path.size(); ++t) {
    TrackFrame frame;
    const auto s = synth_image_features(tile, table, path[t], cam, bins);
    const auto b = polar_to_cartesian(lift_to_polar(s.image, s.alpha), cam, bins, 33, 0.5);
    frame.scores = score_poses_fft(msem, geo, b, bins, mcfg);
    if (t > 0) frame.motion = MotionInput::between(path[t - 1], path[t]);
    frames.push_back(std::move(frame));
  }
  MclConfig mcl;
  mcl.n_init = 300;
  mcl.n_min = 50;
  mcl.seed = cfg.seed;
  const auto estimates = track_sequence(frames, mcl);
  for (std::size_t t = 0; t < estimates.size(); ++t) {
    std::printf("track[%zu]: x=%.6f y=%.6f theta=%.6f n_eff=%.3f n=%d\n", t,
                estimates[t].pose.x, estimates[t].pose.y, estimates[t].pose.theta,
                estimates[t].n_eff, estimates[t].n_particles);
  }
  std::printf("selftest: ok\n");
  return 0;
}

int run(int argc, char** argv) {
  // --config seeds the defaults; explicit flags override below.
  RunConfig cfg;
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") cfg = RunConfig::load_file(argv[i + 1]);
  }
  if (const char* env_threads = std::getenv("OSMLOC_THREADS")) {
    cfg.threads = std::atoi(env_threads);
  }

  CLI::App app{"osmloc: single-image and sequential localization against OpenStreetMap"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand
  std::string config_path;
  app.add_option("--config", config_path, "key=value run configuration file");
  app.add_option("--seed", cfg.seed, "master seed for all randomized stages");
  app.add_option("--threads", cfg.threads, "worker threads (0 = machine parallelism)");

  auto* rasterize_cmd = app.add_subcommand("rasterize", "rasterize an OSM XML extract");
  std::string osm_path, raster_out, taxonomy_path, origin_spec, bounds_spec, png_out;
  rasterize_cmd->add_option("--osm", osm_path, "input .osm XML file")->required();
  rasterize_cmd->add_option("--out", raster_out, "output OSMR raster")->required();
  rasterize_cmd->add_option("--taxonomy", taxonomy_path, "taxonomy rule file");
  rasterize_cmd->add_option("--origin", origin_spec, "lat,lon of the local frame origin");
  rasterize_cmd->add_option("--bounds", bounds_spec, "minx,miny,maxx,maxy local meters");
  rasterize_cmd->add_option("--gsd", cfg.gsd, "meters per pixel");
  rasterize_cmd->add_option("--png", png_out, "also write a palette PNG");

  auto* embed_cmd = app.add_subcommand("embed", "semantic embedding of a raster tile");
  std::string embed_raster, embed_out, embed_center;
  double embed_tile_size = 0.0;
  embed_cmd->add_option("--raster", embed_raster, "input OSMR raster")->required();
  embed_cmd->add_option("--out", embed_out, "output OSMF tensor")->required();
  embed_cmd->add_option("--csem", cfg.c_sem, "per-plane embedding channels");
  embed_cmd->add_option("--center", embed_center, "crop center x,y (local meters)");
  embed_cmd->add_option("--tile-size", embed_tile_size, "crop size in meters");
  embed_cmd->add_option("--taxonomy", taxonomy_path, "taxonomy rule file");

  auto* localize_cmd = app.add_subcommand("localize", "3-DoF localization on a map tile");
  LocalizeArgs largs;
  std::string bins_spec;
  localize_cmd->add_option("--map", largs.map_path, "OSMR map tile")->required();
  localize_cmd->add_option("--taxonomy", largs.taxonomy_path, "taxonomy rule file");
  localize_cmd->add_option("--synth-pose", largs.synth_pose,
                           "x,y,theta: synthesize features at this pose");
  localize_cmd->add_option("--features", largs.features_path, "image features (OSMF)");
  localize_cmd->add_option("--alpha", largs.alpha_path, "depth distribution (OSMF)");
  localize_cmd->add_option("--camera", largs.camera, "fx,cx,rows,cols");
  localize_cmd->add_option("--k", largs.rotations, "rotation sample count");
  localize_cmd->add_option("--lateral-bins", largs.lateral_bins, "BEV lateral bins (odd)");
  localize_cmd->add_option("--bins", bins_spec, "d0,delta,D depth bins");
  localize_cmd->add_option("--csem", cfg.c_sem, "per-plane embedding channels");
  localize_cmd->add_option("--backend", largs.backend, "fft | brute");
  localize_cmd->add_option("--restrict", largs.restrict_spec,
                           "meters,degrees candidate restriction around --prior");
  localize_cmd->add_option("--prior", largs.prior_spec, "x,y,theta restriction center");
  localize_cmd->add_option("--gt", largs.gt_spec, "x,y,theta ground truth for loss report");
  localize_cmd->add_option("--volume", largs.volume_out, "export probability volume (OSMF)");
  localize_cmd->add_option("--heatmap", largs.heatmap_out, "export 16-bit PNG heatmap");
  localize_cmd->add_flag("--single-weighting", largs.single_weighting,
                         "apply the depth distribution once in the BEV lift");
  localize_cmd->add_flag("--valid-cell-norm", largs.valid_cell_norm,
                         "diagnostic: normalize scores by content cells");

  auto* track_cmd = app.add_subcommand("track", "sequential Monte Carlo localization");
  std::string manifest_path, track_out;
  track_cmd->add_option("--manifest", manifest_path, "sequence manifest (JSON)")->required();
  track_cmd->add_option("--out", track_out, "per-frame estimate CSV")->required();

  auto* eval_cmd = app.add_subcommand("eval", "localization metrics from a records CSV");
  std::string records_path, topk_path, report_out, thresholds_spec;
  int kmax = 0;
  bool marginal = false;
  eval_cmd->add_option("--records", records_path, "records CSV")->required();
  eval_cmd->add_option("--topk", topk_path, "ranked candidates sidecar CSV");
  eval_cmd->add_option("--kmax", kmax, "top-k curve depth");
  eval_cmd->add_flag("--marginal", marginal, "top-k success on position only");
  eval_cmd->add_option("--thresholds", thresholds_spec, "e.g. 1,3,5 or 1:1,3:3,5:5");
  eval_cmd->add_option("--out", report_out, "JSON report path");

  auto* bench_cmd = app.add_subcommand("bench", "matcher backend timing comparison");
  int bench_map = 64, bench_c = 8, bench_reps = 5;
  std::string bench_template = "16x17", bench_klist = "16", bench_out;
  bench_cmd->add_option("--map-size", bench_map, "square map side in cells");
  bench_cmd->add_option("--template", bench_template, "DxL template size");
  bench_cmd->add_option("--K", bench_klist, "comma list of rotation counts");
  bench_cmd->add_option("--C", bench_c, "channel count");
  bench_cmd->add_option("--reps", bench_reps, "repetitions per measurement");
  bench_cmd->add_option("--out", bench_out, "CSV output path");

  auto* selftest_cmd = app.add_subcommand("selftest", "deterministic pipeline self-check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (!bins_spec.empty()) {
    const auto bv = parse_numbers(bins_spec, 3, "--bins");
    cfg.bev_d0 = bv[0];
    cfg.bev_delta = bv[1];
    cfg.bev_depth_bins = static_cast<int>(bv[2]);
  }
  cfg.validate();

  if (rasterize_cmd->parsed()) {
    const auto doc = parse_osm_file(osm_path);
    std::printf("parse: %s\n", doc.report.summary().c_str());

    GeoPoint origin;
    if (!origin_spec.empty()) {
      const auto ov = parse_numbers(origin_spec, 2, "--origin");
      origin = GeoPoint{ov[0], ov[1]};
    } else {
      if (doc.nodes.empty()) throw ConfigError("rasterize: no nodes; pass --origin");
      double min_lat = 90, max_lat = -90, min_lon = 180, max_lon = -180;
      for (const auto& [id, node] : doc.nodes) {
        min_lat = std::min(min_lat, node.pos.lat);
        max_lat = std::max(max_lat, node.pos.lat);
        min_lon = std::min(min_lon, node.pos.lon);
        max_lon = std::max(max_lon, node.pos.lon);
      }
      origin = GeoPoint{0.5 * (min_lat + max_lat), 0.5 * (min_lon + max_lon)};
    }
    const auto frame = make_local_frame(origin);
    const auto built = build_geometry(doc, frame, load_taxonomy(taxonomy_path));
    std::printf("geometry: %s\n", built.report.summary().c_str());

    RectM bounds;
    if (!bounds_spec.empty()) {
      const auto bv = parse_numbers(bounds_spec, 4, "--bounds");
      bounds = RectM{bv[0], bv[1], bv[2], bv[3]};
    } else {
      double min_x = 1e300, min_y = 1e300, max_x = -1e300, max_y = -1e300;
      auto grow = [&](const LocalPoint& p) {
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
      };
      for (const auto& poly : built.canvas.polygons) {
        for (const auto& ring : poly.rings) {
          for (const auto& p : ring) grow(p);
        }
      }
      for (const auto& line : built.canvas.polylines) {
        for (const auto& p : line.pts) grow(p);
      }
      for (const auto& point : built.canvas.points) grow(point.pt);
      if (min_x > max_x) throw ConfigError("rasterize: empty canvas; pass --bounds");
      const double pad = 4.0 * cfg.gsd;
      bounds = RectM{min_x - pad, min_y - pad, max_x + pad, max_y + pad};
    }

    const auto raster = rasterize(built.canvas, bounds, cfg.gsd);
    write_osmr_file(raster_out, raster);
    std::printf("raster: %dx%d gsd=%.3f -> %s\n", raster.width, raster.height, raster.gsd,
                raster_out.c_str());
    if (!png_out.empty()) write_raster_png(png_out, raster);
    return 0;
  }

  if (embed_cmd->parsed()) {
    auto raster = read_osmr_file(embed_raster);
    MapTile tile;
    if (!embed_center.empty()) {
      if (embed_tile_size <= 0.0) throw ConfigError("embed: --center needs --tile-size");
      const auto cv = parse_numbers(embed_center, 2, "--center");
      tile = crop_tile(raster, LocalPoint{cv[0], cv[1]}, embed_tile_size);
    } else {
      tile = tile_of_whole_raster(std::move(raster));
    }
    const auto table = build_embedding_table(load_taxonomy(taxonomy_path), cfg.c_sem,
                                             substream_seed(cfg.seed, "embedding"));
    const auto grid = embed_map(tile, table);
    write_osmf_file(embed_out, grid);
    std::printf("embedding: %dx%dx%d -> %s\n", grid.rows, grid.cols, grid.channels,
                embed_out.c_str());
    return 0;
  }

  if (localize_cmd->parsed()) return cmd_localize(cfg, largs);

  if (track_cmd->parsed()) {
    const auto frames = load_manifest(manifest_path);
    MclConfig mcl;
    mcl.n_init = cfg.mcl_particles_init;
    mcl.n_min = cfg.mcl_particles_min;
    mcl.obs.varsigma = cfg.mcl_varsigma;
    mcl.min_sequence = cfg.mcl_min_sequence;
    mcl.max_sequence = cfg.mcl_max_sequence;
    mcl.seed = cfg.seed;
    const auto estimates = track_sequence(frames, mcl);

    std::ofstream out(track_out);
    if (!out) throw ConfigError("cannot open for writing: " + track_out);
    out << "frame,x,y,theta,n_eff,n_particles\n";
    char line[256];
    for (std::size_t t = 0; t < estimates.size(); ++t) {
      std::snprintf(line, sizeof(line), "%zu,%.9f,%.9f,%.9f,%.9f,%d\n", t, estimates[t].pose.x,
                    estimates[t].pose.y, estimates[t].pose.theta, estimates[t].n_eff,
                    estimates[t].n_particles);
      out << line;
    }
    std::printf("track: %zu frames -> %s\n", estimates.size(), track_out.c_str());
    return 0;
  }

  if (eval_cmd->parsed()) {
    auto records = read_records_csv(records_path);
    std::vector<Threshold> thresholds = cfg.thresholds;
    if (!thresholds_spec.empty()) {
      thresholds.clear();
      std::istringstream ss(thresholds_spec);
      std::string item;
      while (std::getline(ss, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) {
          const double v = std::stod(item);
          thresholds.push_back(Threshold{v, v});
        } else {
          thresholds.push_back(
              Threshold{std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1))});
        }
      }
    }

    const auto errs = ape_aoe(records);
    const auto latlon = lat_lon_decompose(records, thresholds);
    std::printf("records: %zu\n", records.size());
    std::ostringstream json;
    json << "{\n  \"records\": " << records.size() << ",\n";
    json << "  \"ape_m\": " << errs.ape_m << ",\n  \"aoe_deg\": " << errs.aoe_deg << ",\n";
    json << "  \"alat_m\": " << latlon.alat_m << ",\n  \"alon_m\": " << latlon.alon_m << ",\n";
    json << "  \"thresholds\": [\n";
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
      const auto& t = thresholds[i];
      const double pr = position_recall(records, t.position_m);
      const double orr = orientation_recall(records, t.orientation_deg);
      std::printf("PR@%gm=%.4f OR@%gdeg=%.4f LatR=%.4f LonR=%.4f\n", t.position_m, pr,
                  t.orientation_deg, orr, latlon.lat_recall[i], latlon.lon_recall[i]);
      json << "    {\"sigma_p\": " << t.position_m << ", \"sigma_o\": " << t.orientation_deg
           << ", \"pr\": " << pr << ", \"or\": " << orr
           << ", \"lat_r\": " << latlon.lat_recall[i]
           << ", \"lon_r\": " << latlon.lon_recall[i] << "}"
           << (i + 1 < thresholds.size() ? ",\n" : "\n");
    }
    json << "  ]";
    std::printf("APE=%.4f m AOE=%.4f deg ALatE=%.4f m ALonE=%.4f m\n", errs.ape_m, errs.aoe_deg,
                latlon.alat_m, latlon.alon_m);

    if (!topk_path.empty()) {
      read_topk_sidecar_csv(topk_path, records);
      if (kmax < 1) throw ConfigError("eval: --topk needs --kmax >= 1");
      json << ",\n  \"topk\": {\n";
      for (std::size_t i = 0; i < thresholds.size(); ++i) {
        const auto curve = recall_curve_topk(records, thresholds[i], kmax,
                                             marginal ? TopkMode::Marginal : TopkMode::Joint);
        std::printf("topk@(%gm,%gdeg):", thresholds[i].position_m, thresholds[i].orientation_deg);
        json << "    \"" << thresholds[i].position_m << "\": [";
        for (int k = 0; k < kmax; ++k) {
          std::printf(" %.4f", curve[k]);
          json << curve[k] << (k + 1 < kmax ? ", " : "");
        }
        std::printf("\n");
        json << "]" << (i + 1 < thresholds.size() ? ",\n" : "\n");
      }
      json << "  }";
    }
    json << "\n}\n";
    if (!report_out.empty()) {
      std::ofstream out(report_out);
      if (!out) throw ConfigError("cannot open for writing: " + report_out);
      out << json.str();
    }
    return 0;
  }

  if (bench_cmd->parsed()) {
    const auto x = bench_template.find('x');
    if (x == std::string::npos) throw ConfigError("bench: --template must be DxL");
    const int depth = std::stoi(bench_template.substr(0, x));
    const int lateral = std::stoi(bench_template.substr(x + 1));
    if (depth < 1 || lateral < 1 || lateral % 2 == 0) {
      throw ConfigError("bench: template must be DxL with odd L");
    }

    std::vector<int> k_list;
    std::istringstream ks(bench_klist);
    std::string item;
    while (std::getline(ks, item, ',')) k_list.push_back(std::stoi(item));
    if (k_list.empty()) throw ConfigError("bench: --K list is empty");

    auto rng = make_rng(cfg.seed, "bench");
    std::uniform_real_distribution<float> dist(-1.0f, 1.0f);
    FeatureGrid map(bench_map, bench_map, bench_c, FrameTag::MapPlane);
    for (auto& v : map.data) v = dist(rng);
    FeatureGrid bev(depth, lateral, bench_c, FrameTag::CartesianBev);
    for (auto& v : bev.data) v = dist(rng);

    const DepthBins bins{0.0, 0.5, depth};
    const VolumeGeo geo{0.5, LocalPoint{0.0, 0.0}};

    std::ostringstream csv;
    csv << "backend,map,template,K,C,reps,median_ms\n";
    std::printf("backend,map,template,K,C,reps,median_ms\n");
    for (const int k : k_list) {
      MatchConfig mcfg;
      mcfg.rotations = k;
      mcfg.bev_gsd = 0.5;
      mcfg.threads = cfg.threads;
      for (const bool fft : {false, true}) {
        std::vector<double> times;
        for (int rep = 0; rep < std::max(1, bench_reps); ++rep) {
          const auto start = std::chrono::steady_clock::now();
          const auto vol = fft ? score_poses_fft(map, geo, bev, bins, mcfg)
                               : score_poses_bruteforce(map, geo, bev, bins, mcfg);
          const auto stop = std::chrono::steady_clock::now();
          times.push_back(std::chrono::duration<double, std::milli>(stop - start).count());
          if (vol.values.empty()) throw Error("bench: empty volume");
        }
        std::sort(times.begin(), times.end());
        const double median = times[times.size() / 2];
        std::printf("%s,%d,%dx%d,%d,%d,%d,%.3f\n", fft ? "fft" : "brute", bench_map, depth,
                    lateral, k, bench_c, bench_reps, median);
        csv << (fft ? "fft" : "brute") << "," << bench_map << "," << depth << "x" << lateral
            << "," << k << "," << bench_c << "," << bench_reps << "," << median << "\n";
      }
    }
    if (!bench_out.empty()) {
      std::ofstream out(bench_out);
      if (!out) throw ConfigError("cannot open for writing: " + bench_out);
      out << csv.str();
    }
    return 0;
  }

  if (selftest_cmd->parsed()) return cmd_selftest(cfg);

  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const FormatError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const DataError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const OutOfCoverageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const InvariantError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 1;
  }
}
