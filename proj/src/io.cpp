// SPDX-License-Identifier: Apache-2.0
#include "edgesim/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace edgesim {

using nlohmann::json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  return out;
}

void write_meta_comment(std::ofstream& out, const ArtifactMeta& meta) {
  out << "# config_hash=" << meta.config_hash << " seeds=" << meta.seeds << "\n";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double_field(const std::string& s, const std::string& where) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing junk");
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error(where + ": bad numeric field '" + s + "'");
  }
}

}  // namespace

void write_player_traces_csv(const std::string& path, const std::vector<PlayerTrace>& traces,
                             const ArtifactMeta& meta) {
  auto out = open_out(path);
  write_meta_comment(out, meta);
  out << "player_id,seg_index,rep_index,bitrate_mbps,bytes,t_request,t_delivered\n";
  for (const auto& t : traces) {
    for (const auto& s : t.segments) {
      out << t.player_id << ',' << s.index << ',' << s.rep << ','
          << format_double(s.bitrate_mbps) << ',' << s.bytes << ','
          << format_double(s.t_request) << ',' << format_double(s.t_delivered) << '\n';
    }
  }
}

void write_stalls_csv(const std::string& path, const std::vector<PlayerTrace>& traces,
                      const ArtifactMeta& meta) {
  auto out = open_out(path);
  write_meta_comment(out, meta);
  out << "player_id,t_start,duration_s\n";
  for (const auto& t : traces) {
    for (const auto& st : t.stalls) {
      out << t.player_id << ',' << format_double(st.start) << ','
          << format_double(st.duration_s) << '\n';
    }
  }
}

void write_cache_events_csv(const std::string& path, const std::vector<CacheEvent>& log,
                            const ArtifactMeta& meta) {
  auto out = open_out(path);
  write_meta_comment(out, meta);
  out << "t,event,seg_index,rep_index,bytes,player_id\n";
  for (const auto& e : log) {
    out << format_double(e.t) << ',' << e.event << ',' << e.seg_index << ',' << e.rep_index
        << ',' << e.bytes << ',' << e.player_id << '\n';
  }
}

void write_player_metrics_csv(const std::string& path, const StrategyReport& report,
                              const ArtifactMeta& meta) {
  auto out = open_out(path);
  write_meta_comment(out, meta);
  out << "player_id,arrival_s,segments,r_avg_mbps,bitrate_dev_mbps,switch_count,"
         "stall_count,stall_avg_s,stall_total_s,qoe\n";
  for (const auto& p : report.players) {
    out << p.player_id << ',' << format_double(p.arrival) << ',' << p.metrics.segments << ','
        << format_double(p.metrics.r_avg_mbps) << ',' << format_double(p.metrics.bitrate_dev_mbps)
        << ',' << p.metrics.switch_count << ',' << p.metrics.stall_count << ','
        << format_double(p.metrics.stall_avg_s) << ',' << format_double(p.metrics.stall_total_s)
        << ',' << format_double(p.qoe) << '\n';
  }
}

void write_dataset_csv(const std::string& path, const std::vector<DatasetRow>& rows,
                       const ArtifactMeta& meta) {
  auto out = open_out(path);
  write_meta_comment(out, meta);
  out << "run_seed,player_id,";
  const auto names = FeatureVector::names();
  for (const auto& n : names) out << n << ',';
  out << "next_bitrate_mbps\n";
  for (const auto& r : rows) {
    out << r.run_seed << ',' << r.player_id << ',';
    for (double v : r.record.features.as_array()) out << format_double(v) << ',';
    out << format_double(r.record.next_bitrate_mbps) << '\n';
  }
}

Dataset read_dataset_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);

  std::string line;
  int line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    header = split_csv_line(line);
    break;
  }
  if (header.empty()) throw std::runtime_error("dataset file " + path + ": missing header");

  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;

  const auto names = FeatureVector::names();
  std::array<std::size_t, FeatureVector::kDim> fcol{};
  for (int i = 0; i < FeatureVector::kDim; ++i) {
    auto it = col.find(std::string(names[static_cast<std::size_t>(i)]));
    if (it == col.end())
      throw std::runtime_error("dataset file " + path + ": missing column " +
                               std::string(names[static_cast<std::size_t>(i)]));
    fcol[static_cast<std::size_t>(i)] = it->second;
  }
  auto label_it = col.find("next_bitrate_mbps");
  if (label_it == col.end())
    throw std::runtime_error("dataset file " + path + ": missing column next_bitrate_mbps");
  const std::size_t label_col = label_it->second;
  const auto seed_it = col.find("run_seed");
  const auto player_it = col.find("player_id");

  Dataset data;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw std::runtime_error("dataset file " + path + " line " + std::to_string(line_no) +
                               ": expected " + std::to_string(header.size()) + " fields");
    const std::string where = path + " line " + std::to_string(line_no);
    std::array<double, FeatureVector::kDim> x;
    for (int i = 0; i < FeatureVector::kDim; ++i) {
      x[static_cast<std::size_t>(i)] =
          parse_double_field(fields[fcol[static_cast<std::size_t>(i)]], where);
    }
    data.x.push_back(x);
    data.y.push_back(parse_double_field(fields[label_col], where));
    if (seed_it != col.end()) {
      data.run_seeds.push_back(static_cast<std::uint64_t>(
          std::llround(parse_double_field(fields[seed_it->second], where))));
    }
    if (player_it != col.end()) {
      data.player_ids.push_back(static_cast<int>(
          std::llround(parse_double_field(fields[player_it->second], where))));
    }
  }
  if (data.x.empty()) throw std::runtime_error("dataset file " + path + ": no data rows");
  return data;
}

void write_confusion_csv(const std::string& path, const ConfusionMatrix& cm,
                         const ArtifactMeta& meta) {
  auto out = open_out(path);
  write_meta_comment(out, meta);
  out << "truth_bitrate";
  for (double l : cm.labels) out << ",pred_" << format_double(l);
  out << '\n';
  for (std::size_t r = 0; r < cm.counts.size(); ++r) {
    out << format_double(cm.labels[r]);
    for (std::uint64_t c : cm.counts[r]) out << ',' << c;
    out << '\n';
  }
}

void write_correlation_csv(const std::string& path,
                           const std::vector<std::vector<double>>& corr,
                           const ArtifactMeta& meta) {
  std::vector<std::string> cols;
  for (const auto& n : FeatureVector::names()) cols.emplace_back(n);
  cols.emplace_back("next_bitrate_mbps");

  auto out = open_out(path);
  write_meta_comment(out, meta);
  out << "column";
  for (const auto& c : cols) out << ',' << c;
  out << '\n';
  for (std::size_t r = 0; r < corr.size(); ++r) {
    out << cols[r];
    for (double v : corr[r]) out << ',' << format_double(v);
    out << '\n';
  }
}

namespace {

json cache_json(const StrategyReport& r) {
  json cache = {{"requests", r.cache.requests},
                {"hits", r.cache.hits},
                {"served_bytes", r.cache.served_bytes},
                {"hit_bytes", r.cache.hit_bytes},
                {"miss_origin_bytes", r.cache.miss_origin_bytes},
                {"cached_bytes", r.cache.cached_bytes},
                {"prefetch_count", r.cache.prefetch_count},
                {"evictions", r.cache.evictions},
                {"served_gb", r.served_gb},
                {"cached_gb", r.cached_gb}};
  if (r.cache_active) {
    cache["hit_ratio"] = r.hit_ratio;
    cache["data_saved_percent"] = r.data_saved_percent;
  } else {
    cache["hit_ratio"] = nullptr;
    cache["data_saved_percent"] = nullptr;
  }
  return cache;
}

json players_json(const StrategyReport& r) {
  return json{{"count", r.player_count},
              {"r_avg_mean_mbps", r.r_avg_mean},
              {"r_avg_dev_mbps", r.r_avg_dev},
              {"switch_mean", r.switch_mean},
              {"stall_count_mean", r.stall_count_mean},
              {"stall_avg_mean_s", r.stall_avg_mean},
              {"stall_total_mean_s", r.stall_total_mean},
              {"qoe_mean", r.qoe_mean},
              {"qoe_dev", r.qoe_dev}};
}

json report_json(const StrategyReport& r) {
  json players = json::array();
  for (const auto& p : r.players) {
    players.push_back({{"player_id", p.player_id},
                       {"arrival_s", p.arrival},
                       {"segments", p.metrics.segments},
                       {"r_avg_mbps", p.metrics.r_avg_mbps},
                       {"bitrate_dev_mbps", p.metrics.bitrate_dev_mbps},
                       {"switch_count", p.metrics.switch_count},
                       {"stall_count", p.metrics.stall_count},
                       {"stall_avg_s", p.metrics.stall_avg_s},
                       {"stall_total_s", p.metrics.stall_total_s},
                       {"qoe", p.qoe}});
  }
  return json{{"strategy", to_string(r.strategy)},
              {"cache", cache_json(r)},
              {"players", players_json(r)},
              {"per_player", std::move(players)}};
}

}  // namespace

json strategy_summary_json(const StrategyReport& r) {
  return json{{"strategy", to_string(r.strategy)},
              {"cache", cache_json(r)},
              {"players", players_json(r)}};
}

std::string report_to_json_text(const std::vector<StrategyReport>& reports,
                                const ArtifactMeta& meta) {
  json j;
  j["config_hash"] = meta.config_hash;
  j["seeds"] = meta.seeds;
  j["strategies"] = json::array();
  for (const auto& r : reports) j["strategies"].push_back(report_json(r));
  return j.dump(2) + "\n";
}

std::string format_report_table(const std::vector<StrategyReport>& reports) {
  std::ostringstream out;
  auto fmt3 = [](double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return std::string(buf);
  };

  auto fixed_or_na = [](double v, bool active, int prec) {
    if (!active) return std::string("n/a");
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", prec, v);
    return std::string(buf);
  };

  out << "cache proxy\n";
  out << "  strategy      hit_ratio   cached_gb   served_gb   data_saved_pct\n";
  for (const auto& r : reports) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "  %-12s  %9s  %10s  %10s  %14s\n",
                  to_string(r.strategy).c_str(),
                  fixed_or_na(r.hit_ratio, r.cache_active, 4).c_str(),
                  fmt3(r.cached_gb).c_str(), fmt3(r.served_gb).c_str(),
                  fixed_or_na(r.data_saved_percent, r.cache_active, 2).c_str());
    out << buf;
  }
  out << "\nplayers (means over " << (reports.empty() ? 0 : reports.front().player_count)
      << " sessions)\n";
  out << "  strategy      r_avg_mbps   s_n     stall_n  stall_avg_s  qoe_mean  qoe_dev\n";
  for (const auto& r : reports) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "  %-12s  %10s  %6s  %7s  %11s  %8s  %7s\n",
                  to_string(r.strategy).c_str(), fmt3(r.r_avg_mean).c_str(),
                  fmt3(r.switch_mean).c_str(), fmt3(r.stall_count_mean).c_str(),
                  fmt3(r.stall_avg_mean).c_str(), fmt3(r.qoe_mean).c_str(),
                  fmt3(r.qoe_dev).c_str());
    out << buf;
  }
  return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  auto out = open_out(path);
  out << content;
  if (!out) throw std::runtime_error("failed writing file: " + path);
}

}  // namespace edgesim
