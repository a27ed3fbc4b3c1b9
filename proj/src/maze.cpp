#include "bayesplan/maze.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

#include "bayesplan/rng.hpp"

namespace bayesplan {

namespace {

constexpr int kDx[kMazeActionCount] = {0, 0, -1, 1};
constexpr int kDy[kMazeActionCount] = {-1, 1, 0, 0};
constexpr int kPlacementRetries = 32;

std::vector<int> floor_tiles(const MazeInstance& maze) {
  std::vector<int> tiles;
  for (int y = 0; y < maze.height; ++y) {
    for (int x = 0; x < maze.width; ++x) {
      if (!maze.is_wall(x, y)) tiles.push_back(maze.tile(x, y));
    }
  }
  return tiles;
}

}  // namespace

std::vector<int> maze_distances(const MazeInstance& maze, int from_tile) {
  std::vector<int> dist(static_cast<std::size_t>(maze.width) * maze.height,
                        -1);
  std::deque<int> queue;
  dist[static_cast<std::size_t>(from_tile)] = 0;
  queue.push_back(from_tile);
  while (!queue.empty()) {
    const int t = queue.front();
    queue.pop_front();
    const int x = t % maze.width;
    const int y = t / maze.width;
    for (int a = 0; a < kMazeActionCount; ++a) {
      const int nx = x + kDx[a];
      const int ny = y + kDy[a];
      if (maze.is_wall(nx, ny)) continue;
      const int nt = maze.tile(nx, ny);
      if (dist[static_cast<std::size_t>(nt)] < 0) {
        dist[static_cast<std::size_t>(nt)] = dist[static_cast<std::size_t>(t)] + 1;
        queue.push_back(nt);
      }
    }
  }
  return dist;
}

MazeInstance maze_generate(std::uint64_t seed, int width, int height) {
  if (width < 3 || height < 3 || width % 2 == 0 || height % 2 == 0) {
    throw std::invalid_argument(
        "maze_generate: width and height must be odd and >= 3");
  }
  MazeInstance maze;
  maze.width = width;
  maze.height = height;
  maze.seed = seed;
  maze.walls.assign(static_cast<std::size_t>(width) * height, 1);

  Rng rng(derive_seed({seed, 0x6d617a65ULL}));

  // Recursive backtracker over the odd-coordinate cell lattice.
  struct Cell {
    int x, y;
  };
  std::vector<Cell> stack;
  auto carve = [&](int x, int y) {
    maze.walls[static_cast<std::size_t>(maze.tile(x, y))] = 0;
  };
  carve(1, 1);
  stack.push_back({1, 1});
  while (!stack.empty()) {
    const Cell c = stack.back();
    int options[kMazeActionCount];
    int n_options = 0;
    for (int a = 0; a < kMazeActionCount; ++a) {
      const int nx = c.x + 2 * kDx[a];
      const int ny = c.y + 2 * kDy[a];
      if (nx < 1 || ny < 1 || nx >= width - 1 || ny >= height - 1) continue;
      if (maze.is_wall(nx, ny)) options[n_options++] = a;
    }
    if (n_options == 0) {
      stack.pop_back();
      continue;
    }
    const int a = options[rng.below(static_cast<std::uint64_t>(n_options))];
    carve(c.x + kDx[a], c.y + kDy[a]);
    carve(c.x + 2 * kDx[a], c.y + 2 * kDy[a]);
    stack.push_back({c.x + 2 * kDx[a], c.y + 2 * kDy[a]});
  }

  // Seeded start/goal placement.
  const std::vector<int> floors = floor_tiles(maze);
  const int want = (width + height) / 2;
  for (int attempt = 0; attempt < kPlacementRetries; ++attempt) {
    const int start = floors[rng.below(floors.size())];
    const std::vector<int> dist = maze_distances(maze, start);
    std::vector<int> candidates;
    int best_tile = start;
    int best_dist = 0;
    for (int t : floors) {
      const int d = dist[static_cast<std::size_t>(t)];
      if (d >= want) candidates.push_back(t);
      if (d > best_dist) {
        best_dist = d;
        best_tile = t;
      }
    }
    if (!candidates.empty()) {
      maze.start = start;
      maze.goal = candidates[rng.below(candidates.size())];
      return maze;
    }
    // Maze too small for the distance target: take a farthest tile instead
    // (degenerates to start == goal only on a single-tile maze).
    if (attempt == kPlacementRetries - 1) {
      maze.start = start;
      maze.goal = best_tile;
      return maze;
    }
  }
  throw MazeGenerationError("maze_generate: start/goal placement failed");
}

std::string maze_to_text(const MazeInstance& maze) {
  std::string out;
  out.reserve(static_cast<std::size_t>(maze.height) * (maze.width + 1));
  for (int y = 0; y < maze.height; ++y) {
    for (int x = 0; x < maze.width; ++x) {
      const int t = maze.tile(x, y);
      char c = maze.is_wall(x, y) ? '#' : '.';
      if (t == maze.start) c = 'S';
      if (t == maze.goal) c = 'G';
      out.push_back(c);
    }
    out.push_back('\n');
  }
  return out;
}

MazeInstance maze_from_text(const std::string& text) {
  std::vector<std::string> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) rows.push_back(line);
  }
  if (rows.empty()) throw std::invalid_argument("maze_from_text: empty input");
  MazeInstance maze;
  maze.height = static_cast<int>(rows.size());
  maze.width = static_cast<int>(rows[0].size());
  maze.walls.assign(static_cast<std::size_t>(maze.width) * maze.height, 1);
  int start = -1, goal = -1;
  for (int y = 0; y < maze.height; ++y) {
    if (static_cast<int>(rows[static_cast<std::size_t>(y)].size()) !=
        maze.width) {
      throw std::invalid_argument("maze_from_text: ragged rows");
    }
    for (int x = 0; x < maze.width; ++x) {
      const char c = rows[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)];
      const int t = maze.tile(x, y);
      switch (c) {
        case '#':
          break;
        case '.':
          maze.walls[static_cast<std::size_t>(t)] = 0;
          break;
        case 'S':
          maze.walls[static_cast<std::size_t>(t)] = 0;
          start = t;
          break;
        case 'G':
          maze.walls[static_cast<std::size_t>(t)] = 0;
          goal = t;
          break;
        default:
          throw std::invalid_argument("maze_from_text: unexpected character");
      }
    }
  }
  if (start < 0 || goal < 0) {
    throw std::invalid_argument("maze_from_text: missing S or G");
  }
  maze.start = start;
  maze.goal = goal;
  return maze;
}

std::shared_ptr<const std::vector<int>> maze_goal_distances(
    const std::shared_ptr<const MazeInstance>& maze) {
  return std::make_shared<const std::vector<int>>(
      maze_distances(*maze, maze->goal));
}

int maze_move(const MazeInstance& maze, int tile, int action) {
  const int x = tile % maze.width + kDx[action];
  const int y = tile / maze.width + kDy[action];
  if (maze.is_wall(x, y)) return tile;
  return maze.tile(x, y);
}

MazeProcess::MazeProcess(std::shared_ptr<const MazeInstance> maze,
                         int root_tile, int horizon,
                         std::shared_ptr<const std::vector<int>> goal_distances)
    : maze_(std::move(maze)),
      root_tile_(root_tile),
      horizon_(horizon),
      dist_to_goal_(std::move(goal_distances)) {
  if (dist_to_goal_ == nullptr) dist_to_goal_ = maze_goal_distances(maze_);
}

StateRef MazeProcess::root() const {
  const auto tile = static_cast<std::uint64_t>(root_tile_);
  return {derive_seed({0x6d7a726fULL, tile}), tile, 0};
}

int MazeProcess::tile_of(const StateRef& state) const {
  return static_cast<int>(state.obs);
}

int MazeProcess::move(int tile, int action) const {
  return maze_move(*maze_, tile, action);
}

std::pair<StateRef, double> MazeProcess::step(const StateRef& state,
                                              int action) const {
  const int next_tile = move(tile_of(state), action);
  // Path identity advances by hashing the taken action into the chain; bump
  // transitions that revisit a tile still yield fresh tree states.
  StateRef next{derive_seed({state.id, static_cast<std::uint64_t>(action)}),
                static_cast<std::uint64_t>(next_tile), state.depth + 1};
  return {next, -1.0};
}

bool MazeProcess::is_terminal(const StateRef& state) const {
  return tile_of(state) == maze_->goal;
}

std::uint64_t MazeProcess::observation_key(const StateRef& state) const {
  return static_cast<std::uint64_t>(tile_of(state));
}

std::vector<double> MazeProcess::gt_q(const StateRef& state) const {
  std::vector<double> q(kMazeActionCount);
  const int tile = tile_of(state);
  for (int a = 0; a < kMazeActionCount; ++a) {
    const int next = move(tile, a);
    const int d = (*dist_to_goal_)[static_cast<std::size_t>(next)];
    q[static_cast<std::size_t>(a)] =
        d < 0 ? -static_cast<double>(horizon_) : -static_cast<double>(1 + d);
  }
  return q;
}

}  // namespace bayesplan
