#!/usr/bin/env python3
"""Regenerate data/jyutping.tsv from the curated readings below.

First reading listed is the default used for pronunciation-level voting.
Traditional and simplified variants are listed separately where both occur
in practice.
"""
from pathlib import Path

ENTRIES = """
我 ngo5
你 nei5
佢 keoi5
哋 dei6
人 jan4
大 daai6
细 sai3
細 sai3
好 hou2,hou3
唔 m4
係 hai6
系 hai6
冇 mou5
有 jau5
睇 tai2
食 sik6
饭 faan6
飯 faan6
饮 jam2
飲 jam2
茶 caa4
水 seoi2
去 heoi3
返 faan1
工 gung1
放 fong3
学 hok6
學 hok6
讲 gong2
講 gong2
话 waa6,waa2
話 waa6,waa2
说 syut3
說 syut3
听 teng1,ting1,ting3
聽 teng1,ting1,ting3
写 se2
寫 se2
读 duk6
讀 duk6
书 syu1
書 syu1
日 jat6
月 jyut6
年 nin4
时 si4
時 si4
分 fan1,fan6
钟 zung1
鐘 zung1
点 dim2
點 dim2
半 bun3
早 zou2
晚 maan5
夜 je6
今 gam1
出 ceot1
入 jap6
行 hang4,haang4,hong4
走 zau2
企 kei5
坐 co5,zo6
住 zyu6
买 maai5
買 maai5
卖 maai6
賣 maai6
钱 cin2,cin4
錢 cin2,cin4
平 peng4,ping4
贵 gwai3
貴 gwai3
多 do1
少 siu2
几 gei2
幾 gei2
乜 mat1
嘢 je5
边 bin1
邊 bin1
度 dou6,dok6
呢 ni1,ne1
嗰 go2
个 go3
個 go3
只 zek3,zi2
隻 zek3
条 tiu4
條 tiu4
样 joeng6
樣 joeng6
嘅 ge3
咗 zo2
紧 gan2
緊 gan2
啦 laa1
喇 laa3
呀 aa3,aa1
嘛 maa3
啊 aa3,aa1
哦 o4,ngo4
喎 wo3,wo5
咁 gam3,gam2
噉 gam2
就 zau6
都 dou1
同 tung4
埋 maai4
先 sin1
再 zoi3
又 jau6
仲 zung6
最 zeoi3
真 zan1
假 gaa2,gaa3
新 san1
旧 gau6
舊 gau6
开 hoi1
開 hoi1
关 gwaan1
關 gwaan1
心 sam1
想 soeng2
知 zi1
道 dou6
识 sik1
識 sik1
得 dak1
见 gin3
見 gin3
屋 uk1
街 gaai1
市 si5
店 dim3
车 ce1,geoi1
車 ce1,geoi1
电 din6
電 din6
脑 nou5
腦 nou5
手 sau2
机 gei1
機 gei1
打 daa2
玩 waan2,wun6
游 jau4
遊 jau4
戏 hei3
戲 hei3
唱 coeng3
歌 go1
跳 tiu3
舞 mou5
完 jyun4
全 cyun4
地 dei6,deng6
天 tin1
用 jung6
来 loi4
來 loi4
嚟 lai4
国 gwok3
國 gwok3
家 gaa1
中 zung1,zung3
文 man4
英 jing1
港 gong2
香 hoeng1
澳 ou3
州 zau1
京 ging1
北 bak1
南 naam4
西 sai1
东 dung1
東 dung1
广 gwong2
廣 gwong2
上 soeng6,soeng5
下 haa6,haa5
左 zo2
右 jau6
前 cin4
后 hau6
後 hau6
里 lei5
外 ngoi6
内 noi6
內 noi6
飞 fei1
飛 fei1
鱼 jyu4
魚 jyu4
鸟 niu5
鳥 niu5
马 maa5
馬 maa5
猫 maau1
貓 maau1
狗 gau2
花 faa1
草 cou2
树 syu6
樹 syu6
山 saan1
海 hoi2
河 ho4
路 lou6
桥 kiu4
橋 kiu4
门 mun4
門 mun4
窗 coeng1
台 toi4
凳 dang3
床 cong4
房 fong4
厅 teng1
廳 teng1
火 fo2
灯 dang1
燈 dang1
色 sik1
红 hung4
紅 hung4
黄 wong4
黃 wong4
蓝 laam4
藍 laam4
绿 luk6
綠 luk6
白 baak6
黑 hak1
长 coeng4,zoeng2
長 coeng4,zoeng2
短 dyun2
高 gou1
矮 ai2
快 faai3
慢 maan6
冻 dung3
凍 dung3
热 jit6
熱 jit6
冷 laang5
暖 nyun5
一 jat1
二 ji6
三 saam1
四 sei3
五 ng5
六 luk6
七 cat1
八 baat3
九 gau2
十 sap6
零 ling4
百 baak3
千 cin1
万 maan6
萬 maan6
亿 jik1
億 jik1
兆 siu6
第 dai6
之 zi1
号 hou6
號 hou6
叫 giu3
做 zou6
俾 bei2
畀 bei2
攞 lo2
搵 wan2
揾 wan2
帮 bong1
幫 bong1
等 dang2
话俾 -
睡 seoi6
瞓 fan3
觉 gok3,gaau3
覺 gok3,gaau3
食饭 -
噍 ziu6
饿 ngo6
餓 ngo6
饱 baau2
飽 baau2
啱 ngaam1
错 co3
錯 co3
对 deoi3
對 deoi3
提 tai4
意 ji3
思 si1
明 ming4
白话 -
聽日 -
琴 kam4
晏 aan3
朝 ziu1,ciu4
昼 zau3
晝 zau3
夜晚 -
宵 siu1
星 sing1
期 kei4
禮 lai5
礼 lai5
拜 baai3
号码 -
码 maa5
碼 maa5
字 zi6
句 geoi3
话语 -
声 seng1,sing1
聲 seng1,sing1
音 jam1
乐 lok6,ngok6
樂 lok6,ngok6
喜 hei2
欢 fun1
歡 fun1
爱 oi3
愛 oi3
惊 geng1,ging1
驚 geng1,ging1
怕 paa3
嬲 nau1
攰 gui6
忙 mong4
闲 haan4
閒 haan4
靓 leng3
靚 leng3
丑 cau2
醜 cau2
肥 fei4
瘦 sau3
重 cung5,zung6
轻 hing1,heng1
輕 hing1,heng1
远 jyun5
遠 jyun5
近 kan5,gan6
深 sam1
浅 cin2
淺 cin2
阔 fut3
闊 fut3
窄 zaak3
湿 sap1
濕 sap1
干 gon1
乾 gon1
净 zeng6,zing6
淨 zeng6,zing6
污 wu1
糟 zou1
烂 laan6
爛 laan6
崩 bang1
整 zing2
修 sau1
换 wun6
換 wun6
洗 sai2
抹 maat3
扫 sou3
掃 sou3
执 zap1
執 zap1
放工 -
收 sau1
送 sung3
攋 -
拎 ling1
抱 pou5
揸 zaa1
推 teoi1
拉 laai1
掟 deng3
踢 tek3
跑 paau2
游水 -
泳 wing6
波 bo1
球 kau4
赛 coi3
賽 coi3
赢 jeng4,jing4
贏 jeng4,jing4
输 syu1
輸 syu1
队 deoi2,deoi6
隊 deoi2,deoi6
组 zou2
組 zou2
员 jyun4
員 jyun4
老 lou5
师 si1
師 si1
生 sang1,saang1
班 baan1
课 fo3
課 fo3
考 haau2
试 si3,si5
試 si3,si5
题 tai4
題 tai4
答 daap3
问 man6
問 man6
教 gaau3
练 lin6
練 lin6
习 zaap6
習 zaap6
功 gung1
名 meng2,ming4
姓 sing3
阿 aa3
妈 maa1,maa4
媽 maa1,maa4
爸 baa1,baa4
哥 go1
姐 ze2,ze1
妹 mui6,mui2
弟 dai6
婆 po4
公 gung1
仔 zai2
女 neoi5
男 naam4
朋 pang4
友 jau5
客 haak3
主 zyu2
醫 ji1
医 ji1
藥 joek6
药 joek6
病 beng6,bing6
痛 tung3
攰咗 -
困 kwan3
累 leoi6
舒 syu1
服 fuk6
康 hong1
健 gin6
身 san1
体 tai2
體 tai2
头 tau4
頭 tau4
面 min6
口 hau2
眼 ngaan5
耳 ji5
鼻 bei6
脚 goek3
腳 goek3
胃 wai6
肚 tou5
餸 sung3
菜 coi3
肉 juk6
鸡 gai1
雞 gai1
鸭 aap3
鴨 aap3
猪 zyu1
豬 zyu1
牛 ngau4
羊 joeng4
蛋 daan2,daan6
奶 naai5
糖 tong4,tong2
盐 jim4
鹽 jim4
油 jau4
酱 zoeng3
醬 zoeng3
醋 cou3
酒 zau2
啤 be1
咖 gaa3,kaa1
啡 fe1
柠 ning4,ning2
檸 ning4,ning2
檬 mung1,mung4
橙 caang2
苹 ping4
蘋 ping4,pan4
果 gwo2
蕉 ziu1
西瓜 -
瓜 gwaa1
菠 bo1
萝 lo4
蘿 lo4
葡 pou4
萄 tou4
面包 -
包 baau1
粉 fan2
麵 min6
面 min6
粥 zuk1
汤 tong1
湯 tong1
甜 tim4
酸 syun1
苦 fu2
辣 laat6
咸 haam4
鹹 haam4
淡 taam5,daam6
香港 -
九龙 -
龙 lung4
龍 lung4
湾 waan1
灣 waan1
岛 dou2
島 dou2
区 keoi1
區 keoi1
省 saang2
城 sing4,seng4
镇 zan3
鎮 zan3
村 cyun1
乡 hoeng1
鄉 hoeng1
楼 lau4
樓 lau4
层 cang4
層 cang4
室 sat1
厦 haa6
廈 haa6
场 coeng4
場 coeng4
园 jyun4
園 jyun4
馆 gun2
館 gun2
局 guk6
站 zaam6
铁 tit3
鐵 tit3
巴 baa1
士 si6
的 dik1
租 zou1
飞机 -
船 syun4
艇 teng5
单 daan1
單 daan1
双 soeng1
雙 soeng1
对面 -
份 fan6
件 gin6
张 zoeng1
張 zoeng1
枝 zi1
支 zi1
把 baa2
部 bou6
架 gaa3,gaa2
辆 loeng2
輛 loeng2
蚊 man1
毫 hou4
纸 zi2
紙 zi2
币 bai6
幣 bai6
卡 kaat1,kaa1
数 sou3,sou2
數 sou3,sou2
计 gai3
計 gai3
算 syun3
加 gaa1
减 gaam2
減 gaam2
乘 sing4
除 ceoi4
共 gung6
总 zung2
總 zung2
约 joek3
約 joek3
超 ciu1
过 gwo3
過 gwo3
差 caa1
唐 tong4
宋 sung3
古 gu2
华 waa4
華 waa4
汉 hon3
漢 hon3
字典 -
典 din2
词 ci4
詞 ci4
语 jyu5
語 jyu5
言 jin4
故 gu3
事 si6
新闻 -
闻 man4
聞 man4
报 bou3
報 bou3
纪 gei2,gei3
紀 gei2,gei3
录 luk6
錄 luk6
片 pin3,pin2
相 soeng1,soeng2
影 jing2
画 waa2,waak6
畫 waa2,waak6
图 tou4
圖 tou4
网 mong5
網 mong5
线 sin3
線 sin3
视 si6
視 si6
频 pan4
頻 pan4
台风 -
风 fung1
風 fung1
雨 jyu5
云 wan4
雲 wan4
雷 leoi4
雪 syut3
冰 bing1
晴 cing4
阴 jam1
陰 jam1
阳 joeng4
陽 joeng4
光 gwong1
暗 am3
静 zing6
靜 zing6
嘈 cou4
声音 -
气 hei3
氣 hei3
空 hung1
温 wan1
溫 wan1
爽 song2
焗 guk6
焫 naat3
冧 lam1,lam3
掂 dim6,dim1
搞 gaau2
办 baan6
辦 baan6
法 faat3
方 fong1
向 hoeng3
位 wai2,wai6
处 cyu3,cyu5
處 cyu3,cyu5
间 gaan1,gaan3
間 gaan1,gaan3
钟意 -
锺 zung1
鍾 zung1
震 zan3
郁 juk1
停 ting4
开始 -
始 ci2
终 zung1
終 zung1
结 git3
結 git3
束 cuk1
继 gai3
繼 gai3
续 zuk6
續 zuk6
直 zik6
曲 kuk1
转 zyun3,zyun2
轉 zyun3,zyun2
弯 waan1
彎 waan1
横 waang4
豎 syu6
竖 syu6
企定 -
郁动 -
慢慢 -
快啲 -
"""


def main() -> None:
    out = Path(__file__).resolve().parents[1] / "src" / "cantofuse" / "data" / "jyutping.tsv"
    table: dict[str, str] = {}
    for line in ENTRIES.strip().splitlines():
        line = line.strip()
        if not line:
            continue
        char, _, readings = line.partition(" ")
        if readings == "-" or len(char) != 1:
            continue  # multi-char notes in the source list are skipped
        assert readings, f"missing readings for {char}"
        for r in readings.split(","):
            assert r and r[-1].isdigit() and r[:-1].isalpha(), f"bad reading {r!r} for {char}"
        if char in table:
            assert table[char] == readings, f"conflicting readings for {char}"
            continue
        table[char] = readings
    lines = ["# Cantonese romanization table (v1).",
             "# One entry per line: <codepoint>\\t<reading1>[,<reading2>...]; first reading is the default."]
    for char in sorted(table):
        lines.append(f"{char}\t{table[char]}")
    out.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {len(table)} entries to {out}")


if __name__ == "__main__":
    main()
