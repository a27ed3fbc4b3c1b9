#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "bayesplan/decision_process.hpp"

namespace bayesplan {

struct MazeGenerationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Maze actions, also the action order of MazeProcess.
enum MazeAction { kUp = 0, kDown = 1, kLeft = 2, kRight = 3 };
inline constexpr int kMazeActionCount = 4;

// A perfect grid maze. Tiles are row-major; walls[y * width + x] != 0 marks
// a wall. Immutable after generation.
struct MazeInstance {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> walls;
  int start = 0;  // tile index
  int goal = 0;   // tile index
  std::uint64_t seed = 0;

  int tile(int x, int y) const { return y * width + x; }
  bool is_wall(int x, int y) const {
    if (x < 0 || y < 0 || x >= width || y >= height) return true;
    return walls[static_cast<std::size_t>(tile(x, y))] != 0;
  }
};

// Deterministic perfect maze carved with a seeded recursive backtracker.
// Start and goal are drawn with shortest-path distance >= (width+height)/2;
// when the maze is too small to satisfy that, the goal falls back to a
// farthest tile from the start.
MazeInstance maze_generate(std::uint64_t seed, int width, int height);

// Text form: '#' wall, '.' floor, 'S' start, 'G' goal, one row per line.
std::string maze_to_text(const MazeInstance& maze);
MazeInstance maze_from_text(const std::string& text);

// BFS shortest-path distances (in tiles) from a source tile; unreachable
// tiles get -1.
std::vector<int> maze_distances(const MazeInstance& maze, int from_tile);

// Neighbor tile after applying an action; bumping a wall stays in place.
int maze_move(const MazeInstance& maze, int tile, int action);

// The maze as a decision process rooted at a given tile. Rewards are -1 per
// step, bumping a wall keeps the agent in place, the goal tile is terminal.
// State ids are depth * n_tiles + tile.
class MazeProcess : public DecisionProcess, public GroundTruthSource {
 public:
  MazeProcess(std::shared_ptr<const MazeInstance> maze, int root_tile,
              int horizon = 50,
              std::shared_ptr<const std::vector<int>> goal_distances = nullptr);

  StateRef root() const override;
  int action_count() const override { return kMazeActionCount; }
  std::pair<StateRef, double> step(const StateRef& state,
                                   int action) const override;
  bool is_terminal(const StateRef& state) const override;
  int horizon() const override { return horizon_; }
  double reward_bound() const override { return 1.0; }
  std::uint64_t observation_key(const StateRef& state) const override;

  std::vector<double> gt_q(const StateRef& state) const override;

  int tile_of(const StateRef& state) const;
  const MazeInstance& maze() const { return *maze_; }

  // Neighbor tile after applying an action (bump = same tile).
  int move(int tile, int action) const;

 private:
  std::shared_ptr<const MazeInstance> maze_;
  int root_tile_;
  int horizon_;
  std::shared_ptr<const std::vector<int>> dist_to_goal_;
};

// Shared distance field so every MazeProcess over the same maze reuses one
// BFS result.
std::shared_ptr<const std::vector<int>> maze_goal_distances(
    const std::shared_ptr<const MazeInstance>& maze);

}  // namespace bayesplan
