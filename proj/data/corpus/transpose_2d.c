const int R = 64;
const int C = 48;

void transpose(int src[R][C], int dst[C][R])
{
    int i;
    int j;
    for (i = 0; i < R; i++)
        for (j = 0; j < C; j++)
            dst[j][i] = src[i][j];
}
