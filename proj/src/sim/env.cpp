#include "sim/env.hpp"

#include <cstring>
#include <fstream>

namespace parkour::sim {

Environment::Environment(const EnvConfig& cfg)
    : cfg_(cfg), assembler_(cfg.obs, cfg.sensor.n_rays) {
  progress_cap_ = static_cast<std::size_t>(std::lround(cfg.term.stuck_window / cfg.dt));
}

Observation Environment::reset(const TerrainProfile* profile, std::uint64_t seed) {
  profile_ = profile;
  profile_->check();
  rng_.seed(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);

  const double x0 = u(rng_) * cfg_.jitter_x;
  state_ = default_state(cfg_.physics, x0, profile_->height(x0));
  state_.theta += u(rng_) * cfg_.jitter_pitch;
  for (int j = 0; j < 4; ++j) state_.q(j) += u(rng_) * cfg_.jitter_q;

  assembler_.reset();
  progress_.clear();
  action_prev_.setZero();
  status_ = Status::running;
  steps_ = 0;
  return observe();
}

Observation Environment::observe() {
  ProprioSample raw;
  raw.omega = state_.omega;
  raw.sin_theta = std::sin(state_.theta);
  raw.cos_theta = std::cos(state_.theta);
  raw.cmd_vx = cfg_.command_vx;
  raw.q = state_.q;
  raw.qd = state_.qd;
  raw.a_prev = action_prev_;
  raw.xd = state_.xd;
  raw.zd = state_.zd;
  const DepthScan scan = sense_depth(cfg_.sensor, cfg_.physics, state_, *profile_);
  assembler_.push(raw, scan, rng_);
  return assembler_.assemble();
}

Observation Environment::step(const Vec4& action, StepData* data) {
  if (profile_ == nullptr) throw std::logic_error("env: step before reset");

  const AgentState prev = state_;
  Vec4 target;
  for (int j = 0; j < 4; ++j)
    target(j) = cfg_.physics.q_default[j] + cfg_.action_scale * action(j);
  const StepEvents events =
      parkour::sim::step(cfg_.physics, *profile_, state_, target, cfg_.dt, cfg_.substeps);

  progress_.push_back(prev.x);
  if (progress_.size() > progress_cap_) progress_.pop_front();

  if (events.fault) {
    status_ = Status::fail_ground;
  } else {
    status_ = check_termination(cfg_.physics, cfg_.term, state_, *profile_, progress_);
  }
  ++steps_;

  if (data != nullptr) {
    data->prev = prev;
    data->next = state_;
    data->action = action;
    data->action_prev = action_prev_;
    data->tau = events.tau;
    data->events = events;
    data->command_vx = cfg_.command_vx;
    data->dt = cfg_.dt;
    data->status = status_;
  }
  action_prev_ = action;
  return observe();
}

std::pair<Trajectory, Status> run_episode(const PolicyFn& policy, const TerrainProfile& profile,
                                          const EnvConfig& cfg, std::uint64_t seed,
                                          int max_steps) {
  Environment env(cfg);
  Observation obs = env.reset(&profile, seed);

  Trajectory traj;
  traj.seed = seed;
  traj.command_vx = cfg.command_vx;
  traj.dt = cfg.dt;
  TrajRecord init;
  init.state = env.state();
  traj.records.push_back(init);

  const int limit = max_steps > 0
                        ? max_steps
                        : static_cast<int>(std::ceil(cfg.term.max_time / cfg.dt)) + 1;
  for (int i = 0; i < limit && env.status() == Status::running; ++i) {
    const Vec4 a = policy(obs);
    StepData data;
    obs = env.step(a, &data);
    TrajRecord rec;
    rec.state = data.next;
    rec.action = data.action;
    rec.tau = data.tau;
    rec.events = data.events;
    rec.status = data.status;
    traj.records.push_back(rec);
  }
  return {traj, env.status()};
}

// --- trajectory serialization ---

namespace {

constexpr char kTrajMagic[4] = {'P', 'T', 'R', 'J'};
constexpr std::uint32_t kTrajVersion = 1;

const std::vector<std::string>& record_fields() {
  static const std::vector<std::string> f = {
      "time",   "x",      "z",      "theta",  "xd",     "zd",     "omega",  "q0",
      "q1",     "q2",     "q3",     "qd0",    "qd1",    "qd2",    "qd3",    "a0",
      "a1",     "a2",     "a3",     "tau0",   "tau1",   "tau2",   "tau3",   "c0",
      "c1",     "air0",   "air1",   "ct0",    "ct1",    "fz0",    "fz1",    "fx0",
      "fx1",    "footx0", "footz0", "footx1", "footz1", "fvx0",   "fvz0",   "fvx1",
      "fvz1",   "status"};
  return f;
}

void put_f32(std::vector<float>& out, double v) { out.push_back(static_cast<float>(v)); }

}  // namespace

void write_trajectory(const std::string& path, const Trajectory& traj) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("trajectory: cannot open " + path + " for writing");
  f.write(kTrajMagic, 4);
  auto put_u32 = [&](std::uint32_t v) { f.write(reinterpret_cast<const char*>(&v), 4); };
  auto put_u64 = [&](std::uint64_t v) { f.write(reinterpret_cast<const char*>(&v), 8); };
  put_u32(kTrajVersion);
  const auto& fields = record_fields();
  put_u32(static_cast<std::uint32_t>(fields.size()));
  for (const auto& name : fields) {
    put_u32(static_cast<std::uint32_t>(name.size()));
    f.write(name.data(), static_cast<std::streamsize>(name.size()));
  }
  put_u64(traj.seed);
  put_u32(static_cast<std::uint32_t>(traj.terrain_id.size()));
  f.write(traj.terrain_id.data(), static_cast<std::streamsize>(traj.terrain_id.size()));
  float cmd = static_cast<float>(traj.command_vx);
  f.write(reinterpret_cast<const char*>(&cmd), 4);
  double dt = traj.dt;
  f.write(reinterpret_cast<const char*>(&dt), 8);
  put_u64(traj.records.size());

  std::vector<float> row;
  for (const auto& r : traj.records) {
    row.clear();
    const AgentState& s = r.state;
    put_f32(row, s.time);
    put_f32(row, s.x);
    put_f32(row, s.z);
    put_f32(row, s.theta);
    put_f32(row, s.xd);
    put_f32(row, s.zd);
    put_f32(row, s.omega);
    for (int j = 0; j < 4; ++j) put_f32(row, s.q(j));
    for (int j = 0; j < 4; ++j) put_f32(row, s.qd(j));
    for (int j = 0; j < 4; ++j) put_f32(row, r.action(j));
    for (int j = 0; j < 4; ++j) put_f32(row, r.tau(j));
    put_f32(row, s.foot_contact[0] ? 1.0 : 0.0);
    put_f32(row, s.foot_contact[1] ? 1.0 : 0.0);
    put_f32(row, s.foot_air_time[0]);
    put_f32(row, s.foot_air_time[1]);
    put_f32(row, s.foot_contact_time[0]);
    put_f32(row, s.foot_contact_time[1]);
    put_f32(row, r.events.feet[0].fz);
    put_f32(row, r.events.feet[1].fz);
    put_f32(row, r.events.feet[0].fx);
    put_f32(row, r.events.feet[1].fx);
    put_f32(row, r.events.feet[0].pos.x());
    put_f32(row, r.events.feet[0].pos.y());
    put_f32(row, r.events.feet[1].pos.x());
    put_f32(row, r.events.feet[1].pos.y());
    put_f32(row, r.events.feet[0].vel.x());
    put_f32(row, r.events.feet[0].vel.y());
    put_f32(row, r.events.feet[1].vel.x());
    put_f32(row, r.events.feet[1].vel.y());
    put_f32(row, static_cast<double>(static_cast<int>(r.status)));
    f.write(reinterpret_cast<const char*>(row.data()),
            static_cast<std::streamsize>(row.size() * sizeof(float)));
  }
  if (!f) throw std::runtime_error("trajectory: write failed for " + path);
}

Trajectory read_trajectory(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("trajectory: cannot open " + path);
  char magic[4];
  f.read(magic, 4);
  if (!f || std::memcmp(magic, kTrajMagic, 4) != 0)
    throw std::runtime_error("trajectory: bad magic in " + path);
  auto get_u32 = [&]() {
    std::uint32_t v = 0;
    f.read(reinterpret_cast<char*>(&v), 4);
    return v;
  };
  auto get_u64 = [&]() {
    std::uint64_t v = 0;
    f.read(reinterpret_cast<char*>(&v), 8);
    return v;
  };
  if (get_u32() != kTrajVersion) throw std::runtime_error("trajectory: unsupported version");
  const std::uint32_t n_fields = get_u32();
  std::vector<std::string> fields(n_fields);
  for (auto& name : fields) {
    const std::uint32_t len = get_u32();
    name.resize(len);
    f.read(name.data(), len);
  }
  if (fields != record_fields())
    throw std::runtime_error("trajectory: field layout mismatch in " + path);

  Trajectory traj;
  traj.seed = get_u64();
  const std::uint32_t id_len = get_u32();
  traj.terrain_id.resize(id_len);
  f.read(traj.terrain_id.data(), id_len);
  float cmd = 0;
  f.read(reinterpret_cast<char*>(&cmd), 4);
  traj.command_vx = cmd;
  f.read(reinterpret_cast<char*>(&traj.dt), 8);
  const std::uint64_t n = get_u64();

  std::vector<float> row(n_fields);
  traj.records.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    f.read(reinterpret_cast<char*>(row.data()),
           static_cast<std::streamsize>(row.size() * sizeof(float)));
    if (!f) throw std::runtime_error("trajectory: truncated file " + path);
    TrajRecord r;
    AgentState& s = r.state;
    int k = 0;
    s.time = row[k++];
    s.x = row[k++];
    s.z = row[k++];
    s.theta = row[k++];
    s.xd = row[k++];
    s.zd = row[k++];
    s.omega = row[k++];
    for (int j = 0; j < 4; ++j) s.q(j) = row[k++];
    for (int j = 0; j < 4; ++j) s.qd(j) = row[k++];
    for (int j = 0; j < 4; ++j) r.action(j) = row[k++];
    for (int j = 0; j < 4; ++j) r.tau(j) = row[k++];
    s.foot_contact[0] = row[k++] != 0.0f;
    s.foot_contact[1] = row[k++] != 0.0f;
    s.foot_air_time[0] = row[k++];
    s.foot_air_time[1] = row[k++];
    s.foot_contact_time[0] = row[k++];
    s.foot_contact_time[1] = row[k++];
    r.events.feet[0].fz = row[k++];
    r.events.feet[1].fz = row[k++];
    r.events.feet[0].fx = row[k++];
    r.events.feet[1].fx = row[k++];
    r.events.feet[0].pos.x() = row[k++];
    r.events.feet[0].pos.y() = row[k++];
    r.events.feet[1].pos.x() = row[k++];
    r.events.feet[1].pos.y() = row[k++];
    r.events.feet[0].vel.x() = row[k++];
    r.events.feet[0].vel.y() = row[k++];
    r.events.feet[1].vel.x() = row[k++];
    r.events.feet[1].vel.y() = row[k++];
    r.events.feet[0].in_contact = s.foot_contact[0];
    r.events.feet[1].in_contact = s.foot_contact[1];
    r.status = static_cast<Status>(static_cast<int>(row[k++]));
    traj.records.push_back(r);
  }
  return traj;
}

}  // namespace parkour::sim
