#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "asmplan/error.hpp"
#include "asmplan/vlm/types.hpp"

namespace asmplan::vlm {

namespace templates {

// Stage I, part list. Images: scene, cover.
inline constexpr std::string_view kPrompt1 = R"P(Input is one image, which is a top view of all the parts of one piece of furniture, each has a number, and another image, which is the first page of the setup manual

You should list all the parts in the image, determine their number and name (short description of the part), and show your result in JSON format.

Following is an example. Note that your output should only contain the JSON code without any explanation.

########## example start ##########

[
    {
      "name": "seat frame,"
      "number": [0]
    },
    {
      "name": "side leg,"
      "number": [1]
    },
    {
      "name": "side le,"
      "number": [2]
    },
    {
        "name": "support b," "
        "number": [3]
    }
]
########## example end ##########)P";

// Stage I, roles. Images: scene, manual pages. The stage-1 JSON is appended.
inline constexpr std::string_view kPrompt2 = R"P(You are a robot assistant responsible for assembling IKEA furniture.

Your inputs include {A}: an rbg image of the scene consisting of furniture parts labeled with white numbers on a black background, {B}: a JSON file that describes the image's objects and labels, and {C}: a set of IKEA setup manual pages.

Please note that you will only construct the piece of furniture that the manual describes.

You can ignore nails and other tools in the manual and only focus on the furniture parts that exist in {A}: the rbg scene image.

First, you are ONLY responsible for identifying the relevant materials that will be required to assemble the furniture in the image. Output a table of selected materials, with their labeled numbers and a brief explanation of why they are selected and how they are related to items on the setup manual. The table format should be JSON, and it should be really similar to {B}, but with an additional explanation section for each selected material and its labeled number. Hint: Usually, in 99.999% of cases, the number of selected materials equals the number of labeled furniture parts.

{{stage1_json}})P";

// Stage II, step plan. Images: scene, cropped manual pages.
inline constexpr std::string_view kPrompt3 = R"P(You are a robot assistant responsible for assembling IKEA furniture. You will be responsible for creating a detailed step-by-step plan for assembling the furniture.

For your input, you will receive a set of images, which represent a few pages of the setup manual containing the setup instructions for the furniture. On the left of each page, there is a rectangular section with a white background and a big, black, bolded number. This number indicates the current assembly step. On each page, we segment the furniture with different colors (the three most common are red, green, and purple, though sometimes other colors are used). The purpose of using these colors is to help you clearly identify which furniture parts are involved in each assembly step.

You will also receive an rbg image of the scene consisting of furniture parts labeled with white numbers on a black background and a JSON-formatted table that describes the RGB image's objects and labels.

Your new task is to carefully describe every step according to the manual. Each colored segmented furniture part should correspond to one step. Your planned steps should only describe what and how segmented furniture parts are involved; don't worry about nails and other minor tools for now. Your focus should only be on the colored segmented furniture parts. Be as specific as possible in your description.

Let's think step by step: (1) count the total number of colored, segmented furniture parts. (Hint: This equals the total number of pages in the manual, with each page identified by a big, bold black number on the left.) The total number of colored, segmented furniture parts will be your total number of steps. (2) for each step, focus on one colored, segmented furniture part at a time. Describe only the furniture parts involved in that step. (3) We repeat step 2 for each remaining step until we have described all the steps. So, if there is only one page of the setup manual overlayed with mask segmentations, then there is only one step. If there are ten pages of the setup manual overlayed with mask segmentations, then there are ten steps.

Here is an example of a fully constructed plan for your reference only. It has nothing to do with the current plan:

########## assistant example start ##########
We have five input images, but one image shows furniture parts lying on a floor that we label with marks (white numbers on a black square background). Therefore, we have only four pages of the setup manual overlaid with mask segmentations. Thus, there are four total steps.

### Step 1:
- **Parts Needed:** Backrest Frame (1), Seat Cushion (5)
- **Instructions:**
  - **Align Frame and Seat:** Connect the backrest frame (1) next to the seat cushion (5) as shown in the segmented manual.

### Step 2:
- **Parts Needed:** Subassembly from Step 1, Side Leg Frame (2)
- **Instructions:**
  - **Position Leg Frame:** Link the first side leg frame (2) with the assembled seat and backrest combo from Step 1.

### Step 3:
- **Parts Needed:** Subassembly from Step 2, Support Beam (3), Support Beam (4), Side Leg Frame (6)
- **Instructions:**
  - **Connect Support Beams:** Attach support beams (3), (4), and the second side leg frame (6) between the assembled frame and leg structure from Step 2. 


########## assistant example end ##########

Now it is your turn to generate a detailed step-by-step plan; here is the JSON formatted table:
{{stage2_json}})P";

// Stage II, text plan to tree. No images.
inline constexpr std::string_view kPrompt4 = R"P(You are a robot assistant responsible for assembling IKEA furnitures.

Your new task is to convert a step-by-step furniture assembly instruction plan from text format into a tree format.

The tree represents the stage of the furniture assembly, with lower-level nodes representing the initial and beginning stages and the upper level representing the concluding and finished stages of the furniture assembly.

We treat each end node (leaf) of the tree as an atomic furniture part that we cannot further decompose. As you move up the tree, each parent node will represent two or more child nodes combined. Finally, the root node will be the completed furniture.

You should clearly describe how every node is connected.

We output the tree strictly as a nested list of integers without any additional comments or text.

EXAMPLE INPUT 1:
Here's a step-by-step assembly plan for the furniture using the provided parts:

### Step 1: Assemble Backrest and Seat
- **Parts Needed:** Backrest Frame (1), Seat Cushion (5)
- **Instructions:**
  - Place the Backrest Frame (1) and Seat Cushion (5) adjacent as shown in their respective colors (red and green).
  - Ensure the backrest is upright and securely attached to the seat.

### Step 2: Attach Side Leg Frame
- **Parts Needed:** Side Leg Frame (2) and subassembly from Step 1
- **Instructions:**
  - Position the Side Leg Frame (2) on one side of the assembled backrest and seat structure.

### Step 3: Attach Side Leg Frame Again
- **Parts Needed:** Side Leg Frame (7) and subassembly from Step 2
- **Instructions:**
  - Position the Side Leg Frame (7) on the other side of the assembled backrest and seat structure.

### Step 4: Connect Support Beams
- **Parts Needed:** Support Beams (3, 4) and subassembly from Step 3
- **Instructions:**
  - Attach Support Beams (3, 4) to the inside of the Side Leg Frame, as depicted.

  
Check the entire assembly for any loose parts and re-tighten as necessary. The chair should now be fully assembled and ready for use.

EXAMPLE OUTPUT 1:
'''python
[
    [
        [
            [
                1,
                5
            ],
            2
        ],
        7
    ],
    3,
    4
]
'''

EXAMPLE INPUT 2:

### Step 1: Connect Support Beams and Leg Frame
**Parts Involved:** Support Beams (0 and 3), Leg Frame (4)
- **Instructions:** Position the leg frame (4) horizontally on the floor. Align the support beams (0 and 1) vertically to connect with the leg frame. Ensure that each beam is fitted securely into the designated slots on the frame.

### Step 2: Attach Backrest Slats
**Parts Involved:** Backrest Slats (2) and subassembly from Step 1
- **Instructions:** Insert the backrest slats (2) into the slots on the leg frame. Ensure that the slats are facing outward and securely fitted to provide back support.

### Step 3: Connect Seat Cushion
**Parts Involved:** Seat Cushion (1) and subassembly from Step 2
- **Instructions:** Place the seat cushion (1) on top of the assembled frame. Align the cushion with the edges of the frame for balance and comfort.

EXAMPLE OUTPUT 2:
'''python
[
    [
        [
            0,
            3,
            4
        ],
        2
    ],
    1
]
'''
EXAMPLE INPUT 3:

### Step 1: Connect Support Beams and Leg Frame
**Parts Involved:** Support Beams (7, 11, 6), Leg Frame (5)
- **Instructions:** Position the leg frame (5) horizontally on the floor. Align the support beams (7, 11, 6) vertically to connect with the leg frame. Ensure that each beam is fitted securely into the designated slots on the frame.

### Step 2: Attach Backrest Slats
**Parts Involved:** Backrest Slats (1, 10) and subassembly from Step 1
- **Instructions:** Insert the backrest slats (1, 10) into the slots on the leg frame. Ensure that the slats are facing outward and securely fitted to provide back support.

### Step 3: Connect Seat Cushion
**Parts Involved:** Seat Cushion (3) and subassembly from Step 2
- **Instructions:** Place the seat cushion (3) on top of the assembled frame. Align the cushion with the edges of the frame for balance and comfort.

### Step 4: Connect Support Beams and Leg Frames
**Parts Involved:** Support Beams (8, 4), Leg Frames (2, 9)
- **Instructions:** Position the leg frame (2, 9) horizontally on the floor. Align the support beams (8, 4) vertically to connect with the leg frame.

### Step 5: Connect Support Beams and Leg Frames
**Parts Involved:** Subassembly from Step 4 and subassembly from Step 3
- **Instructions:** Connect the two subassemblies together

### Step 6: Connect Support Beams and Leg Frames
**Parts Involved:** Leg frame (0) and subassembly from Step 5
- **Instructions:** Connect the final leg frame with the previous subassembly

EXAMPLE OUTPUT 3:
'''python
[
    [
        [
            8,
            4,
            2,
            9
        ],
        [
            [
                [
                    7,
                    11,
                    6,
                    5
                ], 
                1,
                10 
            ],  
            3
        ]
    ]
    0]
'''

YOUR REAL INPUT:
{{plan}})P";

}  // namespace templates

inline std::string_view prompt_template(int id) {
  switch (id) {
    case 1: return templates::kPrompt1;
    case 2: return templates::kPrompt2;
    case 3: return templates::kPrompt3;
    case 4: return templates::kPrompt4;
  }
  throw InvalidArgument("prompt id must be 1..4, got " + std::to_string(id));
}

/// Inputs for the four prompts. Which ones are required depends on the id.
struct PromptBindings {
  std::optional<ImageRef> scene;
  std::optional<ImageRef> cover;
  std::vector<ImageRef> pages;  // full pages for prompt 2, cropped for prompt 3
  std::map<std::string, std::string> text;  // stage1_json, stage2_json, plan
};

/// Replaces every {{name}} in one pass; values are not rescanned.
inline std::string substitute(std::string_view tmpl, const std::map<std::string, std::string>& values) {
  std::string out;
  std::size_t i = 0;
  while (i < tmpl.size()) {
    const std::size_t open = tmpl.find("{{", i);
    if (open == std::string_view::npos) break;
    const std::size_t close = tmpl.find("}}", open + 2);
    if (close == std::string_view::npos) break;
    const std::string key(tmpl.substr(open + 2, close - open - 2));
    auto it = values.find(key);
    if (it == values.end()) throw InvalidArgument("missing prompt binding '" + key + "'");
    out.append(tmpl.substr(i, open - i));
    out.append(it->second);
    i = close + 2;
  }
  out.append(tmpl.substr(i));
  return out;
}

/// Builds the request for prompt `id`. Images go scene first, then the cover
/// (prompt 1) or the manual pages (prompts 2 and 3); prompt 4 is text only.
inline VlmRequest render_prompt(int id, const PromptBindings& b, const std::string& model = {}, double temperature = 0.0) {
  VlmRequest r;
  r.prompt_id = id;
  r.model = model;
  r.temperature = temperature;
  r.text = substitute(prompt_template(id), b.text);
  auto need_scene = [&] {
    if (!b.scene) throw InvalidArgument("prompt " + std::to_string(id) + " needs the scene image");
    r.images.push_back(*b.scene);
  };
  switch (id) {
    case 1:
      need_scene();
      if (!b.cover) throw InvalidArgument("prompt 1 needs the manual cover");
      r.images.push_back(*b.cover);
      break;
    case 2:
    case 3:
      need_scene();
      if (b.pages.empty()) throw InvalidArgument("prompt " + std::to_string(id) + " needs manual pages");
      r.images.insert(r.images.end(), b.pages.begin(), b.pages.end());
      break;
    default:
      break;
  }
  return r;
}

}  // namespace asmplan::vlm
