#include "shotintel/prompt.hpp"

#include "shotintel/error.hpp"

namespace shotintel {
namespace {

// Whitespace is significant: trailing blanks and the indented empty last line
// are part of the instruction text the model saw.
constexpr std::string_view kPromptV1 = R"PROMPT(The images provided are screenshots of computer screens when they were infected by infostealer malware. Describe what is on the screen following this format:

    ### Main Content:
        Describe the main content visible on the screen, include as much detail as possible.

    ### Files/Programs:
        Installer: Focus on installers or install window, put the name of the file being installed. When there is a name for the installer window, get the name of file/folder or the path. 
        File explorer: Focus on file explorer if there is one. Put the names of files and their extensions in this section. If the path of the file explorer reveals the name of a folder/file, get it.
        Ignore all desktop programs and icons. Seperate filenames by a ",". If there aren't any file, executable or progam put "X".

    ### URL
        Put all URLs you see. If there aren't any URLs, put "X".

    ### Browser Tabs Analysis:
        Ignore bookmarks. For each active browser tab in the top row, list in this format:
        - [logo: {logo name}] [text: {visible text}] (meaning/context if apparent). If there aren't any webpage, put "X".

    ### Suspicious Elements:
        Highlight any file, executable, program, URL or download link that could contain malware. These could be youtube videos, blogs, google drive, etc.

    ### Language and Date:
        - **LANGUAGE:** language
        - **DATE:** date 
        
)PROMPT";

}  // namespace

PromptTemplate build_prompt(std::string_view version) {
  if (version != "v1")
    throw Error(ErrorCode::UnknownPromptVersion, "prompt version '" + std::string(version) + "'");
  PromptTemplate t;
  t.version = "v1";
  t.text = std::string(kPromptV1);
  t.required_sections.assign(kSectionNames.begin(), kSectionNames.end());
  return t;
}

}  // namespace shotintel
