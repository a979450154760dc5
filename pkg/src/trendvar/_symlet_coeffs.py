"""Least-asymmetric orthonormal lowpass filter coefficients.

Orders 2..20 (filter length 2K), normalized so the coefficients
sum to sqrt(2).  Generated once by high-precision spectral
factorization and frozen; validated at import time."""

SYMLET_LOWPASS = {
    2: (
        0.48296291314453416,
        0.8365163037378079,
        0.2241438680420134,
        -0.12940952255126037,
    ),
    3: (
        0.33267055295008263,
        0.8068915093110925,
        0.45987750211849154,
        -0.13501102001025458,
        -0.08544127388202666,
        0.03522629188570953,
    ),
    4: (
        -0.07576571478950221,
        -0.029635527646002493,
        0.497618667632775,
        0.8037387518051321,
        0.29785779560530606,
        -0.09921954357663353,
        -0.012603967262031304,
        0.032223100604051466,
    ),
    5: (
        0.027333068344998768,
        0.02951949092570626,
        -0.039134249302313844,
        0.19939753397685558,
        0.7234076904040407,
        0.633978963456792,
        0.01660210576451085,
        -0.17532808990805623,
        -0.021101834024689042,
        0.019538882735249827,
    ),
    6: (
        0.015404109327044824,
        0.0034907120842221626,
        -0.11799011114852002,
        -0.04831174258569806,
        0.49105594192797375,
        0.787641141028651,
        0.3379294217281658,
        -0.07263752278637658,
        -0.02106029251237085,
        0.04472490177078139,
        0.0017677118642540077,
        -0.00780070832503238,
    ),
    7: (
        0.010268176708464817,
        0.0040102448715223955,
        -0.10780823770328972,
        -0.14004724044293365,
        0.2886296317506479,
        0.7677643170048829,
        0.5361019170905692,
        0.017441255086835708,
        -0.04955283493704283,
        0.06789269350122057,
        0.030515513165877885,
        -0.012636303403240567,
        -0.001047384888679738,
        0.002681814568260147,
    ),
    8: (
        -0.0033824159510050028,
        -0.0005421323318000107,
        0.03169508781152599,
        0.007607487324976609,
        -0.14329423835127267,
        -0.061273359067811076,
        0.4813596512590534,
        0.777185751699628,
        0.36444189483617895,
        -0.0519458381078818,
        -0.027219029917103486,
        0.04913717967373029,
        0.0038087520138944896,
        -0.014952258337062199,
        -0.0003029205147241331,
        0.001889950332767689,
    ),
    9: (
        0.0014009155259146562,
        0.0006197808889855071,
        -0.013271967781817134,
        -0.011528210207679187,
        0.030224878858275187,
        0.0005834627461249819,
        -0.05456895843083335,
        0.23876091460730517,
        0.7178970827644124,
        0.6173384491409342,
        0.03527248803527104,
        -0.19155083129728434,
        -0.018233770779395506,
        0.062077789302885746,
        0.008859267493400267,
        -0.010264064027633121,
        -0.00047315449868004354,
        0.001069490032908612,
    ),
    10: (
        0.0007701598091144599,
        9.563267072285273e-05,
        -0.00864129927702215,
        -0.0014653825813046104,
        0.04592723923109151,
        0.011609893903711319,
        -0.1594942788849106,
        -0.07088053578323157,
        0.4716906669384429,
        0.7695100370210979,
        0.3838267610670763,
        -0.035536740473819585,
        -0.03199005688242811,
        0.049994972077375154,
        0.00576491203358115,
        -0.02035493981231111,
        -0.0008043589320164513,
        0.004593173585311792,
        5.703608361849501e-05,
        -0.00045932942100465206,
    ),
    11: (
        0.0004606305605148373,
        -7.65772449580718e-05,
        -0.006771448704106258,
        -0.0019612949999627516,
        0.04376901650963226,
        0.03305858716684881,
        -0.15780577401669701,
        -0.2318019545195779,
        0.2079334318996007,
        0.716393134437828,
        0.5812488825406404,
        0.1197689799624749,
        -0.0014103525839676686,
        0.08424075350641098,
        0.045806026757461774,
        -0.01868001745577665,
        -0.007119110903185566,
        0.007529950423726059,
        0.0009651567686634688,
        -0.0015471763723506476,
        3.032235799056933e-05,
        0.00018239628188471723,
    ),
    12: (
        -0.00017906658697508447,
        -1.8158078862632958e-05,
        0.0023502976141833473,
        0.00030764779631052455,
        -0.014589836449233534,
        -0.002604391031331419,
        0.05780417944550475,
        0.015301740622480154,
        -0.17037069723884962,
        -0.07833262231631544,
        0.46274103121928645,
        0.7634790977836405,
        0.398885972390192,
        -0.022162306170351302,
        -0.035848830736954634,
        0.0491793182996612,
        0.007553780611679315,
        -0.024220722675013403,
        -0.001408909244329129,
        0.007414965517654315,
        0.00018021409008521752,
        -0.001349755755571579,
        -1.1353928041526612e-05,
        0.00011196719424656528,
    ),
    13: (
        6.820325263074355e-05,
        -3.573862364871594e-05,
        -0.001136063438927969,
        -0.00017094285852957213,
        0.00752622538996817,
        0.005296359738721862,
        -0.020216768133395468,
        -0.017211642726304387,
        0.01386249743583841,
        -0.059750627717956466,
        -0.12436246075150338,
        0.19770481877126597,
        0.6957391505615691,
        0.6445643839011571,
        0.11023022302128688,
        -0.14049009311367552,
        0.008819757670429852,
        0.09292603089914397,
        0.017618296880645045,
        -0.020749686325520652,
        -0.0014924472742587286,
        0.005674853760123338,
        0.0004132611988416782,
        -0.0007213643851363755,
        3.690537342323894e-05,
        7.042986690696273e-05,
    ),
    14: (
        4.220014320785332e-05,
        3.6172557736156147e-06,
        -0.0006354851881322328,
        -6.766044627562865e-05,
        0.004537697585299536,
        0.0006235203122978512,
        -0.02058458283744137,
        -0.0038492742355031944,
        0.06761685109309754,
        0.018650326535643823,
        -0.17792194589276836,
        -0.08430768294615623,
        0.45461693898982086,
        0.7585322647669023,
        0.41107149065583304,
        -0.010996383074838904,
        -0.03906858665270088,
        0.04755098184775846,
        0.00916928316390243,
        -0.026916568572214482,
        -0.0020574605441176313,
        0.010043011989769748,
        0.0003596426725397825,
        -0.0025176508186993784,
        -4.160741858341911e-05,
        0.0003856410043283668,
        2.345416590374714e-06,
        -2.736243223877862e-05,
    ),
    15: (
        2.600292958644421e-05,
        4.162242407622912e-06,
        -0.00043336710420386487,
        -8.593762518245263e-05,
        0.003497407508981802,
        0.000913925082986857,
        -0.018962599912694066,
        -0.010413776710632278,
        0.06777188956032723,
        0.06412921145887611,
        -0.15509216673693033,
        -0.23903528617202918,
        0.1975061822012259,
        0.6996488396957217,
        0.5931574589307197,
        0.1489596914053684,
        -0.003830809871368884,
        0.06608633985086645,
        0.03663382231213229,
        -0.030932311848802303,
        -0.016178207868325092,
        0.010587103080700034,
        0.0032739712038937713,
        -0.00362303757809143,
        -0.00029268168686832663,
        0.0010119112757438656,
        3.159327162503914e-05,
        -0.00015475810483093228,
        -1.713551554111647e-06,
        1.0705133445063869e-05,
    ),
    16: (
        -1.0797982104330864e-05,
        -5.396483179313488e-06,
        0.00016545679579123957,
        3.656592483330303e-05,
        -0.001338720606693644,
        -0.0002221164762103135,
        0.006937761130811371,
        0.0013598447424801486,
        -0.024952758046315127,
        -0.0035102750683370914,
        0.07803785290354831,
        0.03072113906329964,
        -0.1595921921853958,
        -0.05404060138744081,
        0.47534280601234713,
        0.7565249878763846,
        0.39712293362039824,
        -0.03457422841769919,
        -0.0669830490706191,
        0.03233309161058235,
        0.004869274404814542,
        -0.03105120284364275,
        -0.0031265171722736304,
        0.012666731659876957,
        0.0007182119788254316,
        -0.0038809122526122205,
        -0.00010844562230766216,
        0.0008523547108065521,
        2.8078582128206924e-05,
        -0.00010943147929558312,
        -3.1135564076138703e-06,
        6.230006701237647e-06,
    ),
    17: (
        3.7912531943316247e-06,
        -2.4527163425740825e-06,
        -7.607124405602918e-05,
        2.5207933140671322e-05,
        0.0007198270642145453,
        5.840042869518092e-05,
        -0.003932325279794941,
        -0.0019054076898564055,
        0.012396988366634302,
        0.009952982523507613,
        -0.01803889724190139,
        -0.007261634750933915,
        0.01615880872591857,
        -0.08607087472063264,
        -0.1550760053497069,
        0.18053958458074407,
        0.681488995344317,
        0.6507166292043823,
        0.1423983504151139,
        -0.11856693261099856,
        0.01727117821060019,
        0.10475461484219489,
        0.01790395221438949,
        -0.03329138349230622,
        -0.004819212803181354,
        0.010482366933016147,
        0.0008567700701928022,
        -0.0027416759756781813,
        -0.00013864230268101327,
        0.00047599638026318304,
        -1.3506383399799107e-05,
        -6.293702597545909e-05,
        2.780126693825943e-06,
        4.297343327338256e-06,
    ),
    18: (
        2.485961490308411e-06,
        6.729793997408882e-07,
        -4.500780415588217e-05,
        -5.793109601174063e-06,
        0.00041034842990739044,
        5.672412058691769e-05,
        -0.0023411772447689224,
        -0.0002756861706489776,
        0.009856762134333768,
        0.0017192429181093615,
        -0.03085612629494498,
        -0.005371485930637385,
        0.08395338201053697,
        0.028758420486383298,
        -0.17673219236417814,
        -0.07816993032151809,
        0.45292937921867643,
        0.7523858568035735,
        0.420296170314231,
        -0.007290779523199082,
        -0.05561401457831262,
        0.03672015801081675,
        0.008596398059412116,
        -0.03158443807938197,
        -0.003958415362757906,
        0.01425104836988376,
        0.0007708733438240781,
        -0.00524468783976525,
        -0.00019016900992115926,
        0.001387216955292587,
        3.172057444776149e-05,
        -0.0002582924341688838,
        -4.066698986845518e-06,
        3.0124194362197284e-05,
        4.3049771415368917e-07,
        -1.5902429397748582e-06,
    ),
    19: (
        1.5131643334920784e-06,
        5.38524532563184e-07,
        -2.9708655926048144e-05,
        -8.304837270235537e-06,
        0.00028674007565417017,
        6.353626360354533e-05,
        -0.0018507524206722334,
        -0.0005071600624388091,
        0.008676985664784885,
        0.0035145333025018493,
        -0.031280681104569844,
        -0.02078184983405004,
        0.0831898291934495,
        0.08763996387000497,
        -0.14736826486594615,
        -0.24048025362520406,
        0.18795297968536936,
        0.6866118114559834,
        0.6027119951885694,
        0.1702466187266762,
        -0.00682958650179713,
        0.04863674495218468,
        0.027146464280437634,
        -0.03825842475281877,
        -0.02110390067015162,
        0.014269616696370842,
        0.006609285033744023,
        -0.005430583759667424,
        -0.0011454119509045333,
        0.0020769022094730364,
        0.0001593834975119284,
        -0.0005853437310897446,
        -2.3284470431178312e-05,
        0.00011009077793142894,
        3.4220369962026217e-06,
        -1.2289995445126938e-05,
        -2.2599390444320366e-07,
        6.350052692352517e-07,
    ),
    20: (
        -6.162010912580689e-07,
        -2.155746396786577e-07,
        1.24182279567714e-05,
        3.9721246125012914e-06,
        -0.00011823043443861893,
        -2.2951227638801978e-05,
        0.0007546305605464095,
        0.00011078268950655748,
        -0.00351819404976607,
        -0.0006267977117436457,
        0.012162873984767938,
        0.0016654186381079219,
        -0.03620906513666103,
        -0.008043659231455667,
        0.08721700815241064,
        0.03219920457732764,
        -0.16919835647546277,
        -0.06292546976649431,
        0.46295670890921203,
        0.7508270653450251,
        0.41426463160435023,
        -0.01819784169598129,
        -0.06985517727670333,
        0.030611284741924726,
        0.010420344554924413,
        -0.030638875003512298,
        -0.0030137560424168632,
        0.01701852474847558,
        0.0014575719674924396,
        -0.006533711295457601,
        -0.00028018055179879344,
        0.002077004967724766,
        6.807226424326575e-05,
        -0.0004889029961213188,
        -1.6307176840158526e-05,
        7.94759310840375e-05,
        2.537098553666309e-06,
        -7.907650505456364e-06,
        -1.3279273139434137e-07,
        3.7957630878245554e-07,
    ),
}
