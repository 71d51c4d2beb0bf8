"""Regenerate data/exemplars.json and data/demo_relevels_grade6.json.

The exemplar demonstrations and hand-leveled texts are maintained here as
Python literals (easier to edit than escaped JSON) and dumped to the
package data files. Run from the repo root:

    python3 tools/build_exemplars.py
"""

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "src" / "relevel" / "data"

BH_G8 = """A black hole is a region of space where gravity is so powerful that nothing has enough energy to escape, not even light. Astronomers can tell a black hole is present by watching how it affects nearby matter and radiation, including visible light. Matter that falls onto a black hole is heated by friction and forms quasars, some of the brightest objects in the universe. Stars that pass too close can be shredded and swallowed.

The idea of a body so large that even light could not escape was proposed by John Michell, an English clergyman and astronomer, in a letter published in November 1784. Michell assumed such a body might have the same density as the Sun. He concluded one would form when a star's diameter grew five hundred times the Sun's, making its surface escape velocity greater than the speed of light. He called these bodies dark stars.

Scholars at first were excited by the idea that giant but invisible "dark stars" might be hiding in plain view. Enthusiasm faded in the early nineteenth century, when scientists learned that light behaves like a wave. If light were a wave rather than a particle, nobody knew how gravity would influence it. In 1915, Albert Einstein presented his theory of general relativity, having already shown that gravity does influence the motion of light.

The term "black hole" appeared in print in 1963 in Life and Science News magazines. Science journalist Ann Ewing used it in her article "Black Holes in Space," dated 18 January 1964. In December 1967, a student reportedly suggested the phrase at a lecture by John Wheeler. Wheeler adopted the term for its brevity and "advertising value," and it caught on quickly, which led many to credit Wheeler with coining it."""

BH_G6 = """A black hole is a region of space where gravity is so strong that nothing can escape, not even light. We cannot see a black hole itself. Instead, we can tell one is there by how it pulls on nearby matter and light. Matter that falls onto a black hole heats up from friction. This forms quasars, some of the brightest objects in the universe. Stars that drift too close can be shredded and swallowed.

The idea of a body so big that even light could not escape came from John Michell, an English clergyman. He wrote about it in a letter published in November 1784. Michell thought such a body might have the same density as the Sun. He said one would form when a star grew five hundred times wider than the Sun. He called these strange bodies dark stars, and the name stuck for years.

At first, scholars were excited by the idea that giant but invisible "dark stars" might be hiding in plain view. Then interest faded in the early 1800s, when light was shown to act like a wave. If light were a wave and not a particle, no one knew how gravity would affect it. In 1915, Albert Einstein shared his theory of general relativity. He had already shown that gravity does bend the path of light.

The name "black hole" first appeared in print in 1963, in Life and Science News magazines. Science writer Ann Ewing used it in her article "Black Holes in Space" in January 1964. In December 1967, a student suggested the phrase at a lecture by John Wheeler. Wheeler liked the short name and its "advertising value," so he adopted it. The term caught on quickly, and many people credit Wheeler with coining it."""

BH_G4 = """A black hole is a place in space. Its gravity is very strong. Nothing can get out, not even light. We cannot see a black hole itself. We find one by how it pulls on things near it. It pulls in gas and dust. Gas that falls in gets hot. It glows and forms quasars. Those are some of the brightest things in space. A star that gets too close can be shredded and swallowed.

Long ago, a man named John Michell had a big idea. He said a body could be so big that light could not escape it. He wrote this in a letter in 1784. He thought the body would be as dense as the Sun. It would be five hundred times as wide. He called these bodies dark stars. People liked his idea at first.

Later, people learned new things about light. Light can act like a wave. If light is a wave, how would gravity pull on it? No one knew. Interest in dark stars faded away. Then, in 1915, Albert Einstein shared his theory of general relativity. He had already shown that gravity can bend light. His work made people think about dark stars again.

The name "black hole" showed up in print in 1963. A writer named Ann Ewing used it in 1964. Her article was called "Black Holes in Space." In 1967, a student said the name at a talk by John Wheeler. Wheeler liked the short name. He used it again and again. Soon everyone used it. The name was easy to say and easy to remember. Many people say Wheeler made the name famous."""

GD_G8 = """The Great Depression (1929-1939) was an economic shock that affected most countries around the world. It was the longest and most widespread depression of the 20th century. Both rich and poor countries saw devastating effects, including falling income, prices, tax revenues, and profits. International trade fell by more than half. In 1933, some thirteen million Americans were unemployed, about 25% of the workforce, which devastated city dwellers and farmers alike.

Unemployment had a ripple effect. The unemployed had little money to spend, so businesses lost customers and were forced to close. People lost their savings, homes, farms, businesses, and dignity. These hardships fell hardest on American Blacks, Latinos, Indigenous people, and women, and the depression echoed around the world. Some positive outcomes remain today: unemployment relief, Social Security, better mortgage lending practices, and the Securities Exchange Commission.

Without income, people could not pay their rent or mortgage and were evicted. While some were lucky enough to move in with family, others slept in the cold on park benches, in sewers, or in the Hoovervilles. These areas were full of makeshift shanties built from scrap materials such as food crates and tar paper. City officials often burned these shelters to smoldering piles, leaving the poor even worse off. Millions also faced hunger and starvation.

Most people had never been dreadfully hungry or forced to dig through garbage, wait in bread lines, or eat at soup kitchens. Rural citizens could at least grow their food, but then natural disasters intensified the suffering. Drought, windstorms, dust storms called black blizzards, and floods ravaged farmlands. Even farmers had no choice but to move. As people left, local economies collapsed and communities transformed into ghost towns."""

GD_G6 = """The Great Depression lasted from 1929 to 1939. It was an economic shock that hurt most countries around the world. It was the longest and widest depression of the 20th century. Rich and poor countries both felt crushing effects, with falling income, prices, tax money, and profits. World trade fell by more than half. By 1933, some thirteen million Americans had no jobs, about one in four workers, hurting city people and farmers alike.

Unemployment had a ripple effect. People without jobs had little money to spend, so businesses lost customers and had to close. People lost their savings, homes, farms, businesses, and dignity. These hardships hit American Blacks, Latinos, Indigenous people, and women hardest, and the pain echoed around the world. Some good things also came out of the Great Depression: unemployment relief, Social Security, better home loan rules, and the Securities Exchange Commission.

Without income, people could not pay their rent or mortgage and were evicted. Some were lucky enough to move in with family. Others slept out in the cold on park benches, in sewers, or in the Hoovervilles. These camps were full of makeshift shanties built from scrap, like food crates and tar paper. City officials often burned these shacks to ash, leaving the poor worse off than before. Millions also faced hunger and starvation.

Most people had never been truly hungry before. Now they dug through garbage, waited in bread lines, or ate at soup kitchens. Poor country families could at least grow food, but then natural disasters made things worse. Drought, windstorms, dust storms called black blizzards, and floods ruined farmland. Even farmers had to move away. As people left, local economies failed, and whole towns turned into ghost towns."""

GD_G4 = """The Great Depression began in 1929. It lasted ten years. It was a hard time for most of the world. It was the worst slump of the 1900s. Rich lands and poor lands both got hurt. Pay, prices, and profits all fell. Trade between countries fell by more than half. By 1933, thirteen million Americans had no jobs. That was one in four workers. Banks failed all over the land. City folks and farmers both suffered.

Job loss had a ripple effect. People with no jobs had no money to spend. Stores lost shoppers and had to close. People lost their savings, homes, farms, and dignity. Black, Latino, and Indigenous families were hit the hardest. Women were hit hard too. The pain spread around the world. But some good things came from it, like unemployment relief and Social Security.

With no pay, people could not cover rent. Many were forced out of their homes. Some moved in with family. Others slept on park benches or in sewers. Some lived in camps called Hoovervilles. The camps were full of makeshift shanties made of scrap wood and tar paper. City workers often burned the shacks down. Then the poor had even less. Many people went hungry.

Most folks had never been so hungry. They dug through trash for food. They stood in bread lines. They ate at soup kitchens. Farm families could grow food, but then natural disasters came. Dust storms called black blizzards buried the fields. The dust was so thick that day turned into night. Floods and drought ruined the rest. Farmers had to move away. Whole towns emptied out and became ghost towns."""

VK_G8 = """Vikings is the modern name given to seafaring people who came from Scandinavia, the region that now includes Norway, Denmark, and Sweden. The origin of the word "Viking" is uncertain. During the Middle Ages, it was the name the Anglo-Saxons used for Scandinavian "pirates" and raiders. The Viking Age began with the earliest recorded raids by Norsemen in 793 and lasted until the Norman conquest of England in 1066.

These Norsemen explored Europe and the edges of Asia by seas and rivers for trade, raids, colonization, and conquest. The Vikings spoke Old Norse and 'wrote' inscriptions in runes, usually on stones or bone fragments. They had their own laws, art, architecture, and religion. Their religion included belief in many gods and goddesses. Popular images of the Vikings often rest on stereotypes; there is no evidence that they wore horned helmets or were unclean savages.

The Vikings traditionally survived by farming, fishing, trapping, and hunting. From the 8th to the late 11th century, however, Vikings sailed their longboats across the North Sea and Baltic Sea. They traveled down rivers across Europe, around the Mediterranean Sea, into the Black Sea, and even across the Atlantic to Iceland and North America. The territory they covered was expansive. They raided and pillaged, traded, served as mercenaries, and settled colonies over a wide area.

Viking settlements have been discovered as far away as Latvia, Russia, Ukraine, and Turkey. Archeological evidence shows that the Vikings traveled as far as Baghdad, the center of the Islamic Empire, and even to Uzbekistan. Two Vikings rose to the throne of England: Sweyn Forkbeard and his son Cnut the Great. Leif Erikson, the famed Viking who voyaged to North America, established a colony in present-day Newfoundland."""

VK_G6 = """Vikings is the modern name for seafaring people who came from Scandinavia. That region includes today's Norway, Denmark, and Sweden. No one is sure where the word "Viking" came from. During the Middle Ages, it was the name the Anglo-Saxons used for Scandinavian "pirates" and raiders. The Viking Age began with the first recorded raids by Norsemen in 793. It lasted until the Norman conquest of England in 1066.

These Norsemen explored Europe and the edges of Asia by sea and river for trade, raids, settling, and conquest. The Vikings spoke Old Norse and 'wrote' in runes, usually on stones or bits of bone. They had their own laws, art, buildings, and religion. They believed in many gods and goddesses. Popular pictures of the Vikings are often based on myths. There is no evidence that they wore horned helmets or were unclean savages.

The Vikings traditionally lived by farming, fishing, trapping, and hunting. From the 8th to the late 11th century, they sailed their longboats across the North Sea and Baltic Sea. They went down rivers across Europe and around the Mediterranean Sea. They even crossed the Atlantic to Iceland and North America. They covered a huge area. They raided, traded, fought for pay, and settled colonies across many lands.

Viking settlements have been found as far away as Latvia, Russia, Ukraine, and Turkey. There is also evidence that Vikings traveled to Baghdad, the center of the Islamic Empire, and even to Uzbekistan. Two Vikings became kings of England: Sweyn Forkbeard and his son Cnut the Great. Leif Erikson, the famous Viking who sailed to North America, started a colony in today's Newfoundland."""

VK_G4 = """Vikings were people who sailed the seas. They came from Scandinavia. Today that land is Norway, Denmark, and Sweden. No one knows just where the name "Viking" came from. In the Middle Ages, it meant sea raiders from the north. Most of them were farmers at home. The Viking Age began with raids in the year 793. It ended when the Normans took England in 1066.

The Norsemen sailed to many lands. They went for trade, raids, new homes, and conquest. Vikings spoke Old Norse. They wrote with marks called runes, cut into stone or bone. They had their own laws, art, and faith. Their art was full of knots and beasts. They believed in many gods and goddesses. Stories about horned helmets are myths. There is no proof they wore them or that they were unclean savages.

Vikings lived by farming, fishing, trapping, and hunting. They also sailed far in their longboats. Their ships were long, light, and fast, and they could sail up shallow rivers. They crossed the North Sea and the Baltic Sea. They rowed down rivers across Europe. They sailed around the Mediterranean Sea and into the Black Sea. They even crossed the ocean to Iceland and North America. They raided, traded, fought for pay, and settled new lands.

Viking homes have been found far away. Some were in Latvia, Russia, Ukraine, and Turkey. Vikings even went to Baghdad, a great city of the Islamic Empire. Two Vikings became kings of England. They were Sweyn Forkbeard and his son Cnut the Great. Leif Erikson sailed to North America. He started a colony in what is now Newfoundland. His trip came long before Columbus."""

SB_G6 = """Simone Biles is an American gymnast born in 1997. She has won 37 Olympic and World Championship medals. That makes her the most decorated gymnast in history, and many call her the greatest gymnast of all time. At the 2016 Summer Olympics in Rio de Janeiro, Biles won gold medals in the all-around, vault, and floor. She also won bronze on the balance beam and a team gold with the United States.

Before the 2020 Olympic Games in Tokyo, people expected Biles to win at least four gold medals. But early in the competition, she withdrew. She spoke about mental health concerns and a case of the "twisties," a sudden loss of air awareness during twisting skills. She received extensive criticism online and in the media. Some people even called her a "quitter" who had "failed her country."

In the next couple of years, Biles became an advocate for mental health treatment in sports. She spoke about the constant pressure and scrutiny that elite athletes face. She returned to competition at the 2023 World Gymnastics Championships in Antwerp, Belgium, where she won the individual all-around. At the U.S. Gymnastics Championships, she won gold in every event and became the first gymnast to win nine all-around titles there.

Biles has also invented five skills that had never been done in competition before. Those skills are now named after her. At age 27, she will go to the 2024 Paris Olympics as the oldest female gymnast on Team USA since 1952. Biles has overcome many obstacles in her life and her sport. Coaches, fans, and rivals agree that she is a once-in-a-lifetime talent."""

OM_G6 = """People still argue about where music came from. Many scholars agree that music is likely as old as humanity itself. Archaeologists have found musical artifacts such as simple bone flutes, rattles, and whistles. Some date back 40,000 years, to the Upper Paleolithic. The first instruments are probably even older than that. One instrument has been around from the very start and is used in every musical tradition: the human voice.

We know little about prehistoric music. From what we do know, it was mostly one melody at a time, made up on the spot. There was no formal system for writing music down, so melodies changed each time they were played. Simple, portable instruments fit a hunter's life. When humans began farming and settled down, new and more complex instruments appeared, and systems for writing music were created.

Western music was born in the Fertile Crescent. After writing developed, music appeared in Chinese, Egyptian, Greek, Indian, Persian, Mesopotamian, and Middle Eastern societies. The oldest known piece of musical notation is on a 4,000-year-old Sumerian clay tablet. It was dug up from ruins in Ugarit, Syria. The tablet includes lyrics and playing instructions. Early tablets were written in cuneiform, a script used for many ancient languages.

"Hurrian Hymn No. 6" is thought to be the earliest melody. The oldest complete song that survives is a Greek tune from the first century AD called the "Seikilos Epitaph." Later, the Silk Road, a network of trade routes across Eurasia, helped carry ideas, knowledge, and customs from land to land. Musical ideas, practices, and instruments traveled with the traders too. New songs and new sounds grew from this exchange."""

DR_G6 = """American disability rights have changed a lot over the past century. Before the disability rights movement and before TV, President Franklin Roosevelt refused to be shown in his wheelchair. He thought that using a wheelchair was a weakness. While campaigning, giving speeches, or acting in public, the president hid his disability. He spread the idea that "disability equates to weakness." That belief shaped how the country treated disabled people.

That idea shows the old stigma around disabilities. For a long time, disability in the United States was seen as a private problem. Few political groups existed to support people or their families. In the 1950s, volunteers and parents began to organize. One example is the March of Dimes. This was the start of activism and support. Before this, children with disabilities were often hidden by their parents, who feared forced rehabilitation.

When the civil rights movement grew in the 1960s, disability advocates and the women's rights movement joined in. Their goal was to promote equal treatment and challenge stereotypes. Around this time, disability rights advocacy began to include all kinds of disabilities. People with physical, mental, visual, and hearing disabilities came together to fight for a common cause, even though their needs were different. Working together made the movement stronger.

In 1990, the Americans with Disabilities Act (ADA) was passed. The law prohibited discrimination due to disability and mandated access in all buildings and public areas. The ADA also defined reasonable accommodation, protecting employees and employers. A reasonable accommodation is a change made in a system to make it fair for a person with a proven need. Needs vary from person to person."""


EXEMPLARS = [
    {
        "id": "black-holes",
        "source_passage_id": "black-holes",
        "long_sentences": [
            "Michell's simplistic calculations assumed such a body might have the same density as "
            "the Sun, and he concluded that one would form when a star's diameter exceeds the "
            "Sun's by a factor of 500 and its surface escape velocity exceeds the usual speed of light.",
            "The term \"black hole\" was used in print by Life and Science News magazines in 1963 "
            "and by science journalist Ann Ewing in her article \"Black Holes in Space,\" dated 18 "
            "January 1964.",
        ],
        "long_words": [
            "electromagnetic", "sufficient", "radiation", "astronomical",
            "simplistic", "enthusiasm", "relativity",
        ],
        "split_sentences": [
            "Michell's simple math assumed such a body might have the same density as the Sun. He "
            "concluded that one would form when a star's diameter is 500 times the Sun's. Then its "
            "surface escape velocity would pass the usual speed of light.",
            "The term \"black hole\" was used in print by Life and Science News magazines in 1963. "
            "Science journalist Ann Ewing used it in her article \"Black Holes in Space,\" dated 18 "
            "January 1964.",
        ],
        "synonyms": ["light", "enough", "rays", "space", "simple", "interest", "gravity theory"],
        "regenerated_text": {"4": BH_G4, "6": BH_G6, "8": BH_G8},
    },
    {
        "id": "great-depression",
        "source_passage_id": "great-depression",
        "long_sentences": [
            "International trade fell by more than half, and in 1933, some thirteen million "
            "Americans were unemployed, representing 25% of the workforce and devastating city "
            "dwellers and farmers alike.",
            "Without income, people were unable to pay their rent or mortgage and were evicted; "
            "while some were lucky enough to move in with family, others slept out in the cold on "
            "park benches, in sewers, or in the Hoovervilles.",
        ],
        "long_words": [
            "unemployment", "disproportionately", "reverberated", "impoverished",
            "metropolitan", "depopulation", "subsequent", "devastating",
        ],
        "split_sentences": [
            "International trade fell by more than half. In 1933, some thirteen million Americans "
            "had no jobs. That was 25% of all workers, and it crushed city dwellers and farmers alike.",
            "Without income, people could not pay their rent or mortgage and were evicted. Some "
            "were lucky enough to move in with family. Others slept out in the cold on park "
            "benches, in sewers, or in the Hoovervilles.",
        ],
        "synonyms": [
            "job loss", "unfairly", "echoed", "poor",
            "city", "people leaving", "later", "crushing",
        ],
        "regenerated_text": {"4": GD_G4, "6": GD_G6, "8": GD_G8},
    },
    {
        "id": "vikings",
        "source_passage_id": "vikings",
        "long_sentences": [
            "However, from the 8th to the late 11th century, Vikings sailed their longboats across "
            "the North Sea and Baltic Sea, down rivers across Europe, around the Mediterranean "
            "Sea, into the Black Sea, and even across the Atlantic to Iceland and North America.",
            "The etymology of the word “Viking” is uncertain, but during the Middle Ages, it was "
            "the designation that the Anglo-Saxons utilized synonymously for Scandinavian "
            "“pirates” and raiders.",
        ],
        "long_words": [
            "etymology", "designation", "synonymously", "colonization",
            "polytheistic", "representations", "Mediterranean", "archeological", "mercenaries",
        ],
        "split_sentences": [
            "From the 8th to the late 11th century, Vikings sailed their longboats across the "
            "North Sea and Baltic Sea. They went down rivers across Europe and around the "
            "Mediterranean Sea. They even crossed into the Black Sea and over the Atlantic to "
            "Iceland and North America.",
            "No one is sure where the word “Viking” came from. During the Middle Ages, it was the "
            "name the Anglo-Saxons used for Scandinavian “pirates” and raiders.",
        ],
        "synonyms": [
            "word origin", "name", "the same way", "settling",
            "many-god", "images", "middle sea", "dig-site", "hired soldiers",
        ],
        "regenerated_text": {"4": VK_G4, "6": VK_G6, "8": VK_G8},
    },
]

DEMO_RELEVELS_G6 = {
    "black-holes": BH_G6,
    "great-depression": GD_G6,
    "vikings": VK_G6,
    "simone-biles": SB_G6,
    "origins-of-music": OM_G6,
    "disability-rights": DR_G6,
}


def main() -> int:
    sys.path.insert(0, str(ROOT / "src"))
    from relevel.readability import count_words, fkgl_of_text, count_syllables

    for ex in EXEMPLARS:
        ex["source_text"] = None  # filled below from the corpus fixtures
    corpus = json.loads((DATA / "corpus_fixtures.json").read_text(encoding="utf-8"))
    by_id = {p["id"]: p for p in corpus["passages"]}
    for ex in EXEMPLARS:
        ex["source_text"] = "\n\n".join(by_id[ex["source_passage_id"]]["paragraphs"])
        for word in ex["long_words"]:
            assert count_syllables(word) >= 3, (ex["id"], word)

    ok = True
    for name, text in {
        **{f"{e['id']} g{g}": t for e in EXEMPLARS for g, t in e["regenerated_text"].items()},
        **{f"demo {k}": v for k, v in DEMO_RELEVELS_G6.items()},
    }.items():
        paras = text.split("\n\n")
        words = count_words(text)
        fkgl = fkgl_of_text(text).fkgl
        status = "ok" if len(paras) == 4 and 270 <= words <= 330 else "OUT OF BOUNDS"
        if status != "ok":
            ok = False
        print(f"{name:28s} paras={len(paras)} words={words:3d} fkgl={fkgl:5.2f} {status}")

    (DATA / "exemplars.json").write_text(
        json.dumps({"exemplars": EXEMPLARS}, ensure_ascii=False, indent=2) + "\n",
        encoding="utf-8",
    )
    (DATA / "demo_relevels_grade6.json").write_text(
        json.dumps(DEMO_RELEVELS_G6, ensure_ascii=False, indent=2) + "\n",
        encoding="utf-8",
    )
    print("wrote exemplars.json and demo_relevels_grade6.json")
    return 0 if ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
