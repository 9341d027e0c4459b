#ifndef WBTK_SYNTH_HPP
#define WBTK_SYNTH_HPP

#include <cstdint>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "wbtk/corpus.hpp"
#include "wbtk/util.hpp"

namespace wbtk {

// Generator settings. Rates are per sentence; pools fill the slots of the
// sentence templates.
struct SyntheticSpec {
  std::size_t n_pos = 100;
  std::size_t n_neg = 100;
  double obligation_rate = 0.5;  // negative sentences phrased with have to / had to / should
  double connection_rate = 0.5;  // positive sentences phrased around shared events
  double reflection_rate = 0.0;  // posts emitted as score 5 plus a deciding reflection
  std::uint64_t seed = 1;
  std::vector<std::string> kin_pool = {"mom", "sister", "cousin", "aunt", "grandma", "brother"};
  std::vector<std::string> food_pool = {"pancake", "waffle",    "pizza",   "burrito",
                                        "bagel",   "dumplings", "oatmeal", "ramen"};
  std::vector<std::string> task_pool = {"clean", "scrub", "wash", "mop"};
  std::vector<std::string> chore_pool = {"homework", "laundry", "essay", "report"};
  std::vector<std::string> room_pool = {"bathroom", "kitchen", "garage", "hallway"};
  std::vector<std::string> device_pool = {"laptop", "phone", "printer"};

  void validate() const {
    auto rate_ok = [](double r) { return r >= 0.0 && r <= 1.0; };
    if (!rate_ok(obligation_rate) || !rate_ok(connection_rate) || !rate_ok(reflection_rate))
      throw ConfigError("synth: rates must lie in [0, 1]");
    if (kin_pool.empty() || food_pool.empty() || task_pool.empty() || chore_pool.empty() ||
        room_pool.empty() || device_pool.empty())
      throw ConfigError("synth: vocabulary pools must be non-empty");
    if (n_pos == 0 || n_neg == 0) throw ConfigError("synth: need posts in both classes");
  }
};

// What the generator actually injected; tests compare matcher behaviour
// against these counts.
struct SynthLog {
  std::size_t pos_posts = 0;
  std::size_t neg_posts = 0;
  std::size_t pos_sentences = 0;
  std::size_t neg_sentences = 0;
  std::size_t obligation_sentences = 0;  // among negative sentences
  std::size_t connection_sentences = 0;  // among positive sentences
  std::size_t reflections = 0;

  nlohmann::json to_json() const {
    return nlohmann::json{{"pos_posts", pos_posts},
                          {"neg_posts", neg_posts},
                          {"pos_sentences", pos_sentences},
                          {"neg_sentences", neg_sentences},
                          {"obligation_sentences", obligation_sentences},
                          {"connection_sentences", connection_sentences},
                          {"reflections", reflections}};
  }
};

namespace detail {

// 2017-03-01T00:00:00Z plus one slot per post/reflection, 15 minutes apart.
inline std::int64_t synth_timestamp(std::size_t index, bool reflection) {
  return 1488326400 + static_cast<std::int64_t>(index * 2 + (reflection ? 1 : 0)) * 900;
}

}  // namespace detail

// Deterministic synthetic diary corpus: recordings scored consistently with
// the intended class, template-shaped sentences around the well-being
// vocabulary, optional score-5 recordings resolved by a reflection.
inline std::pair<std::vector<RawPost>, SynthLog> synthesize(const SyntheticSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  std::vector<RawPost> posts;
  SynthLog log;

  auto pick = [&](const std::vector<std::string>& pool) -> const std::string& {
    return pool[rng.below(pool.size())];
  };

  auto obligation_sentence = [&]() -> std::string {
    switch (rng.below(5)) {
      case 0: return "I had to " + pick(spec.task_pool) + " the " + pick(spec.room_pool) + " again.";
      case 1: return "I have to finish my " + pick(spec.chore_pool) + " tonight.";
      case 2:
        return "Having to " + pick(spec.task_pool) + " the " + pick(spec.room_pool) +
               " ruined my evening.";
      case 3: return "I should start my " + pick(spec.chore_pool) + " but I am so tired.";
      default: return "We had to wait for the bus in the rain.";
    }
  };
  auto plain_negative_sentence = [&]() -> std::string {
    switch (rng.below(10)) {
      case 0: return "I can't sleep again tonight.";
      case 1: return "I missed the bus this morning.";
      case 2: return "My roommate yelled about the dishes.";
      case 3: return "The traffic was horrible today.";
      case 4: return "I am so stressed about my exam.";
      case 5: return "I messed up something important at work.";
      case 6: return "My " + pick(spec.device_pool) + " is not working and I am annoyed.";
      case 7: return "I didn't find the time to finish my " + pick(spec.chore_pool) + ".";
      case 8: return "He didn't text me back all day.";
      default: return "I feel sick and tired tonight.";
    }
  };
  auto negative_tail = [&]() -> std::string {
    switch (rng.below(3)) {
      case 0: return "It was a horrible day.";
      case 1: return "I feel so tired now.";
      default: return "Nothing went right today.";
    }
  };
  auto connection_sentence = [&]() -> std::string {
    switch (rng.below(5)) {
      case 0: return "We had dinner with my " + pick(spec.kin_pool) + " tonight.";
      case 1: return "Catching up with old friends made my day.";
      case 2:
        return "Had a lovely picnic with my " + pick(spec.kin_pool) + " at the park.";
      case 3: return "I went to a party with my roommate.";
      default: return "Having a really nice talk with my " + pick(spec.kin_pool) + ".";
    }
  };
  auto plain_positive_sentence = [&]() -> std::string {
    switch (rng.below(10)) {
      case 0: return "Made a " + pick(spec.food_pool) + " for breakfast.";
      case 1: return "I ate delicious " + pick(spec.food_pool) + " at the new place.";
      case 2: return "Finally finished my " + pick(spec.chore_pool) + " tonight.";
      case 3: return "Took a walk after class and enjoyed the sunshine.";
      case 4: return "I am so relaxed after getting to sleep in.";
      case 5: return "Went on a hike this morning.";
      case 6: return "I feel great about my exam results.";
      case 7: return "My favorite song came on the radio.";
      case 8: return "I finished my paper early and felt proud.";
      default: return "The coffee at the new cafe was wonderful.";
    }
  };
  auto positive_tail = [&]() -> std::string {
    switch (rng.below(3)) {
      case 0: return "It was so much fun.";
      case 1: return "I feel glad tonight.";
      default: return "Best day in a while.";
    }
  };

  std::size_t total = spec.n_pos + spec.n_neg;
  for (std::size_t i = 0; i < total; ++i) {
    bool positive = i < spec.n_pos;
    RawPost post;
    char idbuf[32];
    std::snprintf(idbuf, sizeof(idbuf), "s%04zu", i + 1);
    post.id = idbuf;
    post.author_id = "u" + std::to_string(1 + rng.below(8));
    post.kind = PostKind::Recording;
    post.timestamp = detail::synth_timestamp(i, false);

    std::size_t n_sentences = rng.unit() < 0.7 ? 1 : 2;
    std::string text;
    for (std::size_t k = 0; k < n_sentences; ++k) {
      if (!text.empty()) text += " ";
      if (positive) {
        ++log.pos_sentences;
        if (k == 0) {
          if (rng.unit() < spec.connection_rate) {
            ++log.connection_sentences;
            text += connection_sentence();
          } else {
            text += plain_positive_sentence();
          }
        } else {
          text += positive_tail();
        }
      } else {
        ++log.neg_sentences;
        if (k == 0) {
          if (rng.unit() < spec.obligation_rate) {
            ++log.obligation_sentences;
            text += obligation_sentence();
          } else {
            text += plain_negative_sentence();
          }
        } else {
          text += negative_tail();
        }
      }
    }
    post.text = text;

    bool reflected = rng.unit() < spec.reflection_rate;
    if (reflected) {
      post.score = 5;
    } else {
      post.score = positive ? 6 + static_cast<int>(rng.below(4))
                            : 1 + static_cast<int>(rng.below(4));
    }
    (positive ? log.pos_posts : log.neg_posts) += 1;
    posts.push_back(post);

    if (reflected) {
      RawPost refl;
      refl.id = post.id + "r1";
      refl.author_id = post.author_id;
      refl.kind = PostKind::Reflection;
      refl.parent_id = post.id;
      refl.timestamp = detail::synth_timestamp(i, true);
      refl.score = positive ? 6 + static_cast<int>(rng.below(4))
                            : 1 + static_cast<int>(rng.below(4));
      refl.text = positive ? "Looking back that really was a good day."
                           : "Looking back that day still feels bad.";
      posts.push_back(refl);
      ++log.reflections;
    }
  }
  return {posts, log};
}

}  // namespace wbtk

#endif  // WBTK_SYNTH_HPP
