const int N = 32;

void matmul(int a[N][N], int b[N][N], int c[N][N])
{
    int i;
    int j;
    int k;
    int sum;
    for (i = 0; i < N; i++) {
        for (j = 0; j < N; j++) {
            sum = 0;
            for (k = 0; k < N; k++) {
                sum = sum + a[i][k] * b[k][j];
            }
            c[i][j] = sum;
        }
    }
}
