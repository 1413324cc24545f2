#include "conewalk/walk.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>

namespace conewalk::walk {

namespace {

uint64_t sample_priority(uint64_t master_seed, uint64_t purpose, int64_t path, size_t horizon) {
  uint64_t h = mix64(master_seed ^ (0x9e3779b97f4a7c15ull * (purpose + 1)));
  h = mix64(h ^ (0xff51afd7ed558ccdull * static_cast<uint64_t>(path + 1)));
  return mix64(h ^ static_cast<uint64_t>(horizon * 0xc4ceb9fe1a85ec53ull));
}

void sort_and_truncate(std::vector<EndpointSample>& v, int64_t capacity) {
  std::sort(v.begin(), v.end(), [](const EndpointSample& a, const EndpointSample& b) {
    if (a.priority != b.priority) return a.priority > b.priority;
    return a.path < b.path;
  });
  if (static_cast<int64_t>(v.size()) > capacity) v.resize(capacity);
}

void validate(const BatchRequest& req) {
  if (!req.region) throw argument_error("survival_batch: missing region");
  if (!req.steps) throw argument_error("survival_batch: missing steps");
  if (req.steps->dim() != req.region->dim())
    throw argument_error("survival_batch: steps/region dimension mismatch");
  check_dim(req.start, req.region->dim(), "survival_batch start");
  if (req.horizons.empty()) throw argument_error("survival_batch: no horizons");
  for (size_t i = 0; i + 1 < req.horizons.size(); ++i)
    if (req.horizons[i] >= req.horizons[i + 1])
      throw argument_error("survival_batch: horizons must be strictly increasing");
  if (req.horizons.front() < 1) throw argument_error("survival_batch: horizons must be >= 1");
  if (req.paths < 1) throw argument_error("survival_batch: need paths >= 1");
  if (!req.target_boxes.empty() && req.target_boxes.size() != req.horizons.size())
    throw argument_error("survival_batch: target_boxes must match horizons");
  if (!req.region->contains(req.start))
    throw precondition_error("survival_batch: start outside the region");
}

SurvivalTable empty_table(const BatchRequest& req) {
  SurvivalTable t;
  t.horizons = req.horizons;
  t.total_paths = 0;
  t.at.resize(req.horizons.size());
  for (size_t h = 0; h < req.horizons.size(); ++h) {
    if (!req.target_boxes.empty())
      t.at[h].box_hits.assign(req.target_boxes[h].size(), 0);
    if (req.hist) t.at[h].hist_counts.assign(req.hist->total_bins(), 0);
  }
  return t;
}

void run_block(const BatchRequest& req, int64_t first_path, int64_t last_path,
               SurvivalTable& out) {
  const int d = req.region->dim();
  const auto& horizons = req.horizons;
  const int64_t max_horizon = horizons.back();
  const steps::StepDistribution& dist = *req.steps;
  const geometry::Region& region = *req.region;

  out.total_paths += last_path - first_path;
  double pos[kMaxDim], incr[kMaxDim];
  double scaled[kMaxDim];

  for (int64_t path = first_path; path < last_path; ++path) {
    rng::Stream stream(req.master_seed, req.purpose, static_cast<uint64_t>(path));
    for (int i = 0; i < d; ++i) pos[i] = req.start[i];
    size_t h = 0;
    for (int64_t step = 1; step <= max_horizon; ++step) {
      dist.sample(stream, std::span<double>(incr, d));
      if (req.reversed)
        for (int i = 0; i < d; ++i) pos[i] -= incr[i];
      else
        for (int i = 0; i < d; ++i) pos[i] += incr[i];
      if (!region.contains(std::span<const double>(pos, d))) break;
      if (step != horizons[h]) continue;

      HorizonStats& st = out.at[h];
      ++st.survivors;
      std::span<const double> p(pos, d);
      if (req.functional) {
        double v = req.functional(p);
        st.func_sum += v;
        st.func_sum_sq += v * v;
      }
      if (!req.target_boxes.empty()) {
        const auto& boxes = req.target_boxes[h];
        for (size_t b = 0; b < boxes.size(); ++b)
          if (boxes[b].contains(p)) ++st.box_hits[b];
      }
      if (req.hist) {
        const HistSpec& hs = *req.hist;
        double root = std::sqrt(static_cast<double>(horizons[h]));
        bool in = true;
        int64_t flat = 0, stride = 1;
        for (int i = 0; i < d && in; ++i) {
          scaled[i] = pos[i] / root;
          double rel = (scaled[i] - hs.lo[i]) / hs.bin_width;
          int idx = static_cast<int>(std::floor(rel));
          if (idx < 0 || idx >= hs.bins[i]) in = false;
          flat += stride * idx;
          stride *= hs.bins[i];
        }
        if (in) ++st.hist_counts[flat];
      }
      if (req.reservoir_capacity > 0) {
        EndpointSample s;
        s.priority = sample_priority(req.master_seed, req.purpose, path, h);
        s.path = path;
        s.x.fill(0.0);
        for (int i = 0; i < d; ++i) s.x[i] = pos[i];
        st.sample.push_back(s);
      }
      if (++h == horizons.size()) break;
    }
  }
  for (auto& st : out.at) sort_and_truncate(st.sample, req.reservoir_capacity);
}

void merge_into(SurvivalTable& acc, SurvivalTable&& part, int64_t capacity) {
  acc.total_paths += part.total_paths;
  for (size_t h = 0; h < acc.at.size(); ++h) {
    HorizonStats& a = acc.at[h];
    HorizonStats& b = part.at[h];
    a.survivors += b.survivors;
    a.func_sum += b.func_sum;
    a.func_sum_sq += b.func_sum_sq;
    for (size_t i = 0; i < a.box_hits.size(); ++i) a.box_hits[i] += b.box_hits[i];
    for (size_t i = 0; i < a.hist_counts.size(); ++i) a.hist_counts[i] += b.hist_counts[i];
    if (!b.sample.empty()) {
      a.sample.insert(a.sample.end(), b.sample.begin(), b.sample.end());
      sort_and_truncate(a.sample, capacity);
    }
  }
}

}  // namespace

double SurvivalTable::phat_stderr(size_t h) const {
  double p = phat(h);
  return std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(total_paths));
}

double SurvivalTable::func_stderr(size_t h) const {
  double n = static_cast<double>(total_paths);
  double m = at[h].func_sum / n;
  double var = std::max(at[h].func_sum_sq / n - m * m, 0.0);
  return std::sqrt(var / n);
}

double SurvivalTable::box_stderr(size_t h, size_t b) const {
  double p = box_phat(h, b);
  return std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(total_paths));
}

SurvivalTable survival_batch_serial(const BatchRequest& req) {
  validate(req);
  SurvivalTable acc = empty_table(req);
  const int64_t bs = std::max<int64_t>(req.block_size, 1);
  for (int64_t first = 0; first < req.paths; first += bs) {
    SurvivalTable part = empty_table(req);
    run_block(req, first, std::min(first + bs, req.paths), part);
    merge_into(acc, std::move(part), req.reservoir_capacity);
  }
  return acc;
}

SurvivalTable survival_batch_parallel(const BatchRequest& req, int workers) {
  validate(req);
  SurvivalTable acc = empty_table(req);
  const int64_t bs = std::max<int64_t>(req.block_size, 1);
  const int64_t nblocks = (req.paths + bs - 1) / bs;
  // blocks are processed in bounded chunks; the merge is a left fold in block
  // order, so the result does not depend on workers or chunking
  const int64_t chunk = std::max<int64_t>(4, 4 * workers);
  std::vector<SurvivalTable> parts;
  for (int64_t base = 0; base < nblocks; base += chunk) {
    int64_t count = std::min(chunk, nblocks - base);
    parts.assign(count, SurvivalTable{});
#pragma omp parallel for schedule(dynamic) num_threads(workers)
    for (int64_t k = 0; k < count; ++k) {
      int64_t b = base + k;
      parts[k] = empty_table(req);
      run_block(req, b * bs, std::min((b + 1) * bs, req.paths), parts[k]);
    }
    for (int64_t k = 0; k < count; ++k)
      merge_into(acc, std::move(parts[k]), req.reservoir_capacity);
  }
  return acc;
}

SurvivalTable survival_batch(const BatchRequest& req, int workers) {
  if (workers <= 1) return survival_batch_serial(req);
  return survival_batch_parallel(req, workers);
}

ExitRecord simulate_exit(std::span<const double> start, const steps::StepDistribution& dist,
                         const geometry::Region& region, std::span<const int64_t> horizons,
                         rng::Stream& stream, bool reversed) {
  int d = region.dim();
  check_dim(start, d, "simulate_exit");
  if (dist.dim() != d) throw argument_error("simulate_exit: steps/region dimension mismatch");
  if (horizons.empty() || horizons.front() < 1)
    throw argument_error("simulate_exit: need horizons >= 1");
  if (!region.contains(start))
    throw precondition_error("simulate_exit: start outside the region");

  ExitRecord rec;
  rec.survived.assign(horizons.size(), 0);
  double pos[kMaxDim], prev[kMaxDim], incr[kMaxDim];
  for (int i = 0; i < d; ++i) pos[i] = start[i];
  int64_t max_horizon = horizons.back();
  size_t h = 0;
  for (int64_t step = 1; step <= max_horizon; ++step) {
    for (int i = 0; i < d; ++i) prev[i] = pos[i];
    dist.sample(stream, std::span<double>(incr, d));
    for (int i = 0; i < d; ++i) pos[i] += reversed ? -incr[i] : incr[i];
    if (!region.contains(std::span<const double>(pos, d))) {
      rec.exit_time = step;
      rec.endpoint.assign(prev, prev + d);
      return rec;
    }
    while (h < horizons.size() && step == horizons[h]) {
      rec.survived[h] = 1;
      rec.horizon_points.emplace_back(pos, pos + d);
      ++h;
    }
  }
  rec.exit_time = max_horizon + 1;
  rec.censored = true;
  rec.endpoint.assign(pos, pos + d);
  return rec;
}

}  // namespace conewalk::walk
